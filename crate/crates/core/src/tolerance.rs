//! Named numerical tolerances and sample budgets.
//!
//! Every knob has a default and can be overridden by name, either from the
//! scene file's `tolerances` block or from the command line.

use crate::error::{Error, Result};
use serde::Serialize;

trait TolValue: Sized {
    fn from_f64(name: &str, v: f64) -> Result<Self>;
    fn to_f64(&self) -> f64;
}

impl TolValue for f64 {
    fn from_f64(name: &str, v: f64) -> Result<Self> {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::InvalidTolerance {
                name: name.to_string(),
                value: v,
            })
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl TolValue for usize {
    fn from_f64(name: &str, v: f64) -> Result<Self> {
        if (1.0..=1e8).contains(&v) && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(Error::InvalidTolerance {
                name: name.to_string(),
                value: v,
            })
        }
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

macro_rules! tolerances {
    ($( $(#[$doc:meta])* $name:ident : $ty:ty = $default:expr ),* $(,)?) => {
        /// All tolerances, thresholds and sample counts used by the engine.
        #[derive(Debug, Clone, PartialEq, Serialize)]
        pub struct Tolerances {
            $( $(#[$doc])* pub $name: $ty, )*
        }

        impl Default for Tolerances {
            fn default() -> Self {
                Tolerances { $( $name: $default, )* }
            }
        }

        impl Tolerances {
            /// Every recognised key, in declaration order.
            pub const KEYS: &'static [&'static str] = &[$(stringify!($name)),*];

            /// Sets one tolerance by name. Unknown names and non-positive
            /// values are rejected.
            pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
                match key {
                    $( stringify!($name) => {
                        self.$name = <$ty as TolValue>::from_f64(stringify!($name), value)?;
                    } )*
                    _ => return Err(Error::InvalidScene(format!("unknown tolerance key `{key}`"))),
                }
                Ok(())
            }

            /// Reads one tolerance by name.
            pub fn get(&self, key: &str) -> Option<f64> {
                match key {
                    $( stringify!($name) => Some(TolValue::to_f64(&self.$name)), )*
                    _ => None,
                }
            }
        }
    };
}

tolerances! {
    /// Unit-speed and orthogonality tolerance of the arclength parametrization.
    tol_arc: f64 = 1e-10,
    /// Curvature threshold relative to 1/L below which the normal is absent.
    kappa_tol_rel: f64 = 1e-9,
    /// Relative agreement required between exact and finite-difference derivatives.
    tol_fd: f64 = 1e-6,
    /// Finite-difference step relative to the component length.
    fd_step_rel: f64 = 1e-5,
    /// Relative slack when testing membership of the closed domain W.
    w_boundary_rel: f64 = 1e-12,
    /// Grid samples per component for the mu-closest point search.
    closest_samples: usize = 2048,
    /// Relative tie band for mu-closest points.
    tie_rel: f64 = 1e-9,
    /// Criticality band on F' in units of 2/mu^2.
    tol_grad_rel: f64 = 1e-8,
    /// Degeneracy band on F'' in units of 2/mu^2.
    tol_hess_rel: f64 = 1e-8,
    /// Band on Delta relative to max(1, mu^2 kappa^2).
    delta_band_rel: f64 = 1e-12,
    /// Samples per component for the focal radius profiles.
    focal_samples: usize = 4096,
    /// Grid resolution per axis for the double critical pair search.
    pair_grid: usize = 256,
    /// Excluded diagonal band, relative to the component length.
    pair_band_rel: f64 = 1e-3,
    /// Dimensionless residual accepted for a double critical pair.
    pair_tol: f64 = 1e-9,
    /// Newton iteration cap for the pair search.
    pair_max_iter: usize = 50,
    /// Angle law tolerance at the feet of a double critical pair.
    angle_law_tol: f64 = 1e-6,
    /// Collapse arc band on |kappa'|.
    eps_kappa: f64 = 1e-7,
    /// Collapse arc band on |gamma''' + kappa^2 gamma'|.
    eps_gamma: f64 = 1e-7,
    /// Collapse arc band on |mu'' + kappa^2 mu / 4|.
    eps_mu: f64 = 1e-10,
    /// Collapse arc band on |mu'^2 - mu mu'' - 1/r^2|.
    eps_r: f64 = 1e-9,
    /// Collapse arc band on the spread of the common image point.
    eps_p: f64 = 1e-7,
    /// Minimal collapse arc length relative to the component length.
    arc_min_len_rel: f64 = 1e-3,
    /// Maximal deviation of mu from the fitted cosine on a collapse arc.
    arc_fit_tol: f64 = 1e-6,
    /// Samples per component for singular set and collapse scans.
    singular_samples: usize = 4096,
    /// Band on |mu'' + kappa^2 mu / 4| at a refined singular point.
    tol_sng: f64 = 1e-7,
    /// Regular value threshold on |g'| for the transversality diagnostic.
    eps_reg: f64 = 1e-6,
    /// Lower band of the singularity test agreement check.
    tau_lo: f64 = 1e-6,
    /// Upper band of the singularity test agreement check.
    tau_hi: f64 = 1e-3,
    /// Tube boundary membership band relative to R^2.
    tube_tol_rel: f64 = 1e-8,
    /// Samples per component for the disjointness check.
    disjoint_samples: usize = 512,
}

impl Tolerances {
    /// Applies a `KEY=VALUE` override string.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidScene(format!("override `{kv}` is not KEY=VALUE")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidScene(format!("override `{kv}` has a non-numeric value")))?;
        self.set(k.trim(), value)
    }

    /// Criticality band at weight `mu`.
    pub fn grad_band(&self, mu: f64) -> f64 {
        self.tol_grad_rel * 2.0 / (mu * mu)
    }

    /// Degeneracy band at weight `mu`.
    pub fn hess_band(&self, mu: f64) -> f64 {
        self.tol_hess_rel * 2.0 / (mu * mu)
    }
}
