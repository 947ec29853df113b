/// Tolerances shared by the validation and classification routines.
///
/// All values are relative. `structural` scales with the largest diagonal
/// entry of the matrix under test, `zero_eigenvalue` with the largest
/// eigenvalue magnitude and `metric_slack` with the largest distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Row sums, symmetry, off-diagonal sign dead-band and dihedral-angle dead-band.
    pub structural: f64,
    pub zero_eigenvalue: f64,
    /// Triangle-inequality violations below this fraction of the largest entry are ignored.
    pub metric_slack: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        structural: 1e-9,
        zero_eigenvalue: crate::linalg::ZERO_EIGENVALUE_RTOL,
        metric_slack: 1e-12,
    };

    /// Every tolerance set to the same value, as used by the `--tol` flag.
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            structural: tol,
            zero_eigenvalue: tol,
            metric_slack: tol,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
