//! Upper-tail percentage points of the Anderson-Darling statistic for a GPD
//! whose parameters are estimated by maximum likelihood (Choulakian and
//! Stephens, 2001).

/// Upper-tail probabilities, one per column of [`AD_CRITICAL`].
pub(crate) const AD_LEVELS: [f64; 8] = [0.5, 0.25, 0.1, 0.05, 0.025, 0.01, 0.005, 0.001];

/// Shape values, one per row of [`AD_CRITICAL`], ascending.
pub(crate) const AD_XI: [f64; 10] = [-0.5, -0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.5, 0.9];

pub(crate) const AD_CRITICAL: [[f64; 8]; 10] = [
    [0.496, 0.735, 1.061, 1.321, 1.590, 1.958, 2.243, 2.922],
    [0.468, 0.688, 0.985, 1.221, 1.465, 1.799, 2.058, 2.674],
    [0.445, 0.649, 0.924, 1.140, 1.365, 1.672, 1.909, 2.475],
    [0.426, 0.617, 0.873, 1.074, 1.283, 1.567, 1.788, 2.314],
    [0.410, 0.591, 0.831, 1.020, 1.215, 1.481, 1.687, 2.176],
    [0.397, 0.569, 0.796, 0.974, 1.158, 1.409, 1.603, 2.064],
    [0.386, 0.550, 0.766, 0.935, 1.110, 1.348, 1.532, 1.966],
    [0.376, 0.534, 0.741, 0.903, 1.069, 1.296, 1.471, 1.893],
    [0.356, 0.499, 0.685, 0.830, 0.978, 1.180, 1.336, 1.707],
    [0.339, 0.471, 0.641, 0.771, 0.905, 1.086, 1.226, 1.559],
];
