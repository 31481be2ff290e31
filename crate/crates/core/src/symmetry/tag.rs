use serde::{Deserialize, Serialize};

/// Membership of a solution in the optimal system of one-dimensional
/// subalgebras of the stress algebra.
///
/// Representatives are written in the polar basis
/// `X1 = r d_r`, `X2 = d_phi + d_theta`, `X3 = d_sigma`; `weight` scales the
/// `X3` part so that the representative matches a solution's normalization
/// of `sigma` directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum SubalgebraTag {
    /// `X4 + alpha X1`, quasi-scale.
    Theta1 { alpha: f64 },
    /// `X3 + alpha X1`.
    Theta2 { alpha: f64 },
    /// `X2 + alpha X1`.
    Theta3 { alpha: f64 },
    /// `weight X3 + sign X2 + alpha X1`, `sign = +1` or `-1`.
    Theta4 { sign: i8, weight: f64, alpha: f64 },
    /// `X1`.
    Theta5,
    /// An element of the infinite part: `sigma_coeff d_sigma + x_coeff d_x + y_coeff d_y`
    /// with constant coefficients.
    Translation { sigma_coeff: f64, x_coeff: f64, y_coeff: f64 },
    /// No documented subalgebra.
    Unspecified,
}

impl SubalgebraTag {
    pub fn label(&self) -> String {
        match self {
            SubalgebraTag::Theta1 { alpha } => format!("Theta1(alpha={alpha})"),
            SubalgebraTag::Theta2 { alpha } => format!("Theta2(alpha={alpha})"),
            SubalgebraTag::Theta3 { alpha } => format!("Theta3(alpha={alpha})"),
            SubalgebraTag::Theta4 { sign, weight, alpha } => {
                let s = if *sign >= 0 { "+" } else { "-" };
                format!("Theta4{s}(weight={weight}, alpha={alpha})")
            }
            SubalgebraTag::Theta5 => "Theta5".to_string(),
            SubalgebraTag::Translation { sigma_coeff, x_coeff, y_coeff } => {
                format!("<{sigma_coeff} d_sigma + {x_coeff} d_x + {y_coeff} d_y>")
            }
            SubalgebraTag::Unspecified => "unspecified".to_string(),
        }
    }
}
