//! Catalog lookup by name and JSON parameter object.

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::catalog::{
    CharacteristicField, NadaiCavity, NadaiChannel, NadaiChannelSingular, NadaiChannelUnit, NadaiTwoCircles,
    NadaiVortex, Prandtl, Revuzhenko, RevuzhenkoSign, SimpleWave, Spiral, SpiralIntegration, StressField,
    ThetaBracket,
};
use crate::error::{Error, Result};
use crate::plane::{FunctionParam, FunctionSpec};

/// Names accepted by [`build`], followed by those accepted by [`build_characteristic`].
pub const SOLUTIONS: &[&str] = &[
    "prandtl",
    "nadai_cavity",
    "nadai_vortex",
    "nadai_channel",
    "nadai_channel_unit",
    "nadai_channel_singular",
    "nadai_two_circles",
    "spiral",
    "simple_wave",
    "simple_wave_fan",
    "spiral_2",
    "revuzhenko",
];

fn half() -> f64 {
    0.5
}
fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PrandtlParams {
    #[serde(default)]
    c: f64,
    #[serde(default = "one")]
    m: f64,
    #[serde(default = "one")]
    h: f64,
    #[serde(default = "half")]
    k: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscParams {
    #[serde(rename = "R", default = "one")]
    radius: f64,
    #[serde(default)]
    p: f64,
    #[serde(default = "half")]
    k: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelParams {
    #[serde(default = "two")]
    c: f64,
    #[serde(default = "half")]
    k: f64,
    #[serde(rename = "const", default)]
    sigma_const: f64,
    #[serde(default)]
    c1: f64,
    psi_lo: Option<f64>,
    psi_hi: Option<f64>,
}

fn two() -> f64 {
    2.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelUnitParams {
    #[serde(rename = "A", default)]
    a: f64,
    #[serde(default = "half")]
    k: f64,
    #[serde(rename = "const", default)]
    sigma_const: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SingularParams {
    #[serde(default = "half")]
    k: f64,
    #[serde(rename = "const", default)]
    sigma_const: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoCirclesParams {
    #[serde(default = "one")]
    a: f64,
    #[serde(default = "sqrt2")]
    b: f64,
    #[serde(default = "half")]
    k: f64,
}

fn sqrt2() -> f64 {
    std::f64::consts::SQRT_2
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpiralParams {
    #[serde(rename = "A")]
    a_coef: Option<f64>,
    #[serde(default = "one")]
    alpha: f64,
    #[serde(default = "half")]
    k: f64,
    #[serde(default)]
    lambda_const: f64,
    #[serde(rename = "const", default)]
    sigma_const: f64,
    #[serde(default)]
    quadrature: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimpleWaveParams {
    #[serde(rename = "Phi", default = "zero_spec")]
    phi: FunctionSpec,
    #[serde(default)]
    n: i32,
    #[serde(rename = "const", default)]
    sigma_const: f64,
    #[serde(default = "half")]
    k: f64,
    bracket: Option<ThetaBracket>,
}

fn zero_spec() -> FunctionSpec {
    FunctionSpec::Zero
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FanParams {
    #[serde(default)]
    n: i32,
    #[serde(default = "half")]
    k: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Spiral2Params {
    #[serde(rename = "C", default = "one")]
    c: f64,
    #[serde(default = "half")]
    k: f64,
    #[serde(rename = "const", default)]
    sigma_const: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RevuzhenkoParams {
    #[serde(default = "upper")]
    sign: RevuzhenkoSign,
}

fn upper() -> RevuzhenkoSign {
    RevuzhenkoSign::Upper
}

fn parse<T: DeserializeOwned>(params: &Value) -> Result<T> {
    let v = if params.is_null() { Value::Object(Default::default()) } else { params.clone() };
    serde_json::from_value(v).map_err(|e| Error::param("params", e.to_string()))
}

/// Builds a catalog stress field from its name and a JSON object of parameters.
/// Missing parameters take their documented defaults; unknown keys are rejected.
pub fn build(name: &str, params: &Value) -> Result<Box<dyn StressField>> {
    Ok(match name {
        "prandtl" => {
            let p: PrandtlParams = parse(params)?;
            Box::new(Prandtl::new(p.c, p.m, p.h, p.k)?)
        }
        "nadai_cavity" => {
            let p: DiscParams = parse(params)?;
            Box::new(NadaiCavity::new(p.radius, p.p, p.k)?)
        }
        "nadai_vortex" => {
            let p: DiscParams = parse(params)?;
            Box::new(NadaiVortex::new(p.radius, p.p, p.k)?)
        }
        "nadai_channel" => {
            let p: ChannelParams = parse(params)?;
            let mut ch = NadaiChannel::new(p.c, p.k, p.sigma_const, p.c1)?;
            match (p.psi_lo, p.psi_hi) {
                (Some(lo), Some(hi)) => ch = ch.with_psi_bracket(lo, hi)?,
                (None, None) => {}
                _ => return Err(Error::param("psi_lo/psi_hi", "give both ends of the bracket or neither")),
            }
            Box::new(ch)
        }
        "nadai_channel_unit" => {
            let p: ChannelUnitParams = parse(params)?;
            Box::new(NadaiChannelUnit::new(p.a, p.k, p.sigma_const)?)
        }
        "nadai_channel_singular" => {
            let p: SingularParams = parse(params)?;
            Box::new(NadaiChannelSingular::new(p.k, p.sigma_const)?)
        }
        "nadai_two_circles" => {
            let p: TwoCirclesParams = parse(params)?;
            Box::new(NadaiTwoCircles::new(p.a, p.b, p.k)?)
        }
        "spiral" => {
            let p: SpiralParams = parse(params)?;
            let a = p.a_coef.unwrap_or(2.0 * std::f64::consts::SQRT_2 * p.k);
            let mut s = Spiral::new(a, p.alpha, p.k)?.with_constants(p.lambda_const, p.sigma_const);
            if p.quadrature {
                s = s.with_integration(SpiralIntegration::Quadrature)?;
            }
            Box::new(s)
        }
        "simple_wave" => {
            let p: SimpleWaveParams = parse(params)?;
            let bracket = p.bracket.unwrap_or(ThetaBracket::AroundPolarAngle {
                lo: -std::f64::consts::PI,
                hi: 0.0,
            });
            Box::new(SimpleWave::new(FunctionParam::from_spec(&p.phi), p.n, p.sigma_const, p.k, bracket)?)
        }
        "simple_wave_fan" => {
            let p: FanParams = parse(params)?;
            Box::new(SimpleWave::fan(p.n, p.k)?)
        }
        "spiral_2" => {
            let p: Spiral2Params = parse(params)?;
            Box::new(SimpleWave::spiral(p.c, p.k, p.sigma_const)?)
        }
        "revuzhenko" | "revuzhenko_upper" | "revuzhenko_lower" => {
            return Err(Error::UnsupportedField {
                field: name.to_string(),
                what: "evaluation at a plane point; use the characteristic-coordinate interface".into(),
            })
        }
        other => return Err(Error::UnknownSolution(other.to_string())),
    })
}

/// Builds a field parameterized by characteristic coordinates.
pub fn build_characteristic(name: &str, params: &Value) -> Result<Box<dyn CharacteristicField>> {
    match name {
        "revuzhenko" => {
            let p: RevuzhenkoParams = parse(params)?;
            Ok(Box::new(Revuzhenko::new(p.sign)))
        }
        "revuzhenko_upper" => Ok(Box::new(Revuzhenko::new(RevuzhenkoSign::Upper))),
        "revuzhenko_lower" => Ok(Box::new(Revuzhenko::new(RevuzhenkoSign::Lower))),
        other if SOLUTIONS.contains(&other) => Err(Error::UnsupportedField {
            field: other.to_string(),
            what: "characteristic-coordinate parameterization".into(),
        }),
        other => Err(Error::UnknownSolution(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn builds_every_plane_solution_with_defaults() {
        for name in SOLUTIONS.iter().filter(|n| **n != "revuzhenko") {
            let f = build(name, &Value::Null).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!f.name().is_empty());
        }
        assert!(build_characteristic("revuzhenko", &json!({"sign": "lower"})).is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(build("nope", &Value::Null), Err(Error::UnknownSolution(_))));
        assert!(matches!(build("prandtl", &json!({"q": 1})), Err(Error::InvalidParameter { .. })));
        assert!(build("prandtl", &json!({"m": 2.0})).is_err());
    }
}
