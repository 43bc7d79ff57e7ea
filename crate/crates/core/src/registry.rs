//! Named channels with parameter maps, as used by the command-line front end.
//!
//! | name           | parameters (defaults)                          | target              |
//! |----------------|------------------------------------------------|---------------------|
//! | `example1`     | `lambda` (π/5), or `beta`                      | `(|0⟩+|1⟩)/√2`      |
//! | `weak-swap`    | `lambda` (π/4), `dim` (2), `target_index` (0)  | `|target_index⟩`    |
//! | `bell`         | `lambda` (π/5)                                 | Φ⁺                  |
//! | `pairwise`     | `lambda` (π/2)                                 | Φ⁺                  |
//! | `povm-method1` | `eta` (0.5), unsharp σ_z measurement           | `(|0⟩+|1⟩)/√2`      |
//! | `povm-method2` | `extension` (0.3), three-level diagonal POVM   | `(|0⟩+|1⟩)/√2` in ℂ³ |

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::channels::KrausChannel;
use crate::constructors::{
    bell_kraus, build_method1, build_method2, example1_kraus, example1_setup, pairwise_setup, weak_swap_channel,
    weak_swap_toward, Povm,
};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::states::PureState;

pub const CHANNEL_NAMES: [&str; 6] = ["example1", "weak-swap", "bell", "pairwise", "povm-method1", "povm-method2"];

/// A registry name with numeric parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl ChannelSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Parses `name` or `name:key=value,key=value`; values accept [`parse_angle`] syntax.
    pub fn parse(text: &str) -> Result<Self> {
        let (name, rest) = match text.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (text.trim(), None),
        };
        let mut spec = ChannelSpec::new(name);
        if let Some(rest) = rest {
            for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
                let (k, v) = parse_assignment(item)?;
                spec.params.insert(k, v);
            }
        }
        Ok(spec)
    }

    pub fn is_registered(&self) -> bool {
        CHANNEL_NAMES.contains(&self.name.as_str())
    }

    fn allow(&self, keys: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidParameter(format!(
                "channel '{}' has no parameter '{k}' (accepted: {})",
                self.name,
                keys.join(", ")
            ))),
            None => Ok(()),
        }
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn get_index(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(&x) if x >= 0.0 && x.fract() == 0.0 => Ok(x as usize),
            Some(x) => Err(Error::InvalidParameter(format!("{key} must be a nonnegative integer, got {x}"))),
        }
    }

    /// Builds the channel and its natural target.
    pub fn build(&self) -> Result<(KrausChannel, PureState)> {
        self.build_with_target(None)
    }

    /// Builds the channel, steering towards `target` where the construction allows a free target.
    pub fn build_with_target(&self, target: Option<&PureState>) -> Result<(KrausChannel, PureState)> {
        let fixed_target = |natural: PureState| -> Result<PureState> {
            match target {
                Some(t) if t.dim() != natural.dim() || (t.overlap(&natural).norm() - 1.0).abs() > 1e-10 => {
                    Err(Error::InvalidParameter(format!(
                        "channel '{}' has a fixed target; the requested target differs",
                        self.name
                    )))
                }
                _ => Ok(natural),
            }
        };
        match self.name.as_str() {
            "example1" => {
                self.allow(&["lambda", "beta"])?;
                let channel = match (self.params.get("beta"), self.params.get("lambda")) {
                    (Some(_), Some(_)) => {
                        return Err(Error::InvalidParameter("example1 takes lambda or beta, not both".into()))
                    }
                    (Some(&beta), None) => example1_kraus(beta),
                    (None, lambda) => example1_setup(lambda.copied().unwrap_or(PI / 5.0)).channel()?,
                };
                Ok((channel, fixed_target(PureState::plus())?))
            }
            "weak-swap" => {
                self.allow(&["lambda", "dim", "target_index"])?;
                let lambda = self.get("lambda", PI / 4.0);
                match target {
                    Some(t) if !self.params.contains_key("dim") && !self.params.contains_key("target_index") => {
                        Ok((weak_swap_toward(t, lambda)?, t.clone()))
                    }
                    _ => {
                        let d = self.get_index("dim", 2)?;
                        let idx = self.get_index("target_index", 0)?;
                        let channel = weak_swap_channel(lambda, d, idx)?;
                        Ok((channel, fixed_target(PureState::basis(d, idx))?))
                    }
                }
            }
            "bell" => {
                self.allow(&["lambda"])?;
                Ok((bell_kraus(self.get("lambda", PI / 5.0)), fixed_target(PureState::phi_plus())?))
            }
            "pairwise" => {
                self.allow(&["lambda"])?;
                let setup = pairwise_setup(self.get("lambda", PI / 2.0));
                Ok((setup.channel()?, fixed_target(setup.target)?))
            }
            "povm-method1" => {
                self.allow(&["eta"])?;
                let povm = Povm::unsharp_z(self.get("eta", 0.5))?;
                let t = fixed_target(PureState::plus())?;
                Ok((build_method1(&povm, &t)?, t))
            }
            "povm-method2" => {
                self.allow(&["extension"])?;
                let povm = Povm::diagonal(&[&[0.5, 0.25, 0.0], &[0.5, 0.75, 0.0], &[0.0, 0.0, 1.0]])?;
                let t = fixed_target(PureState::from_real(&[1.0, 1.0, 0.0])?)?;
                let ext = C64::new(self.get("extension", 0.3), 0.0);
                Ok((build_method2(&povm, &t, &[ext])?, t))
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown channel '{other}' (known: {})",
                CHANNEL_NAMES.join(", ")
            ))),
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

/// Parses `key=value`.
pub fn parse_assignment(item: &str) -> Result<(String, f64)> {
    let (k, v) = item
        .split_once('=')
        .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got '{item}'")))?;
    Ok((k.trim().to_string(), parse_angle(v)?))
}

/// Parses a number, also accepting multiples of π such as `pi`, `pi/5`, `2pi/5`, `0.3pi`, `3*pi/4`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s: String = text.trim().to_ascii_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidParameter(format!("cannot parse number '{}'", text.trim()));
    if let Ok(x) = s.parse::<f64>() {
        return if x.is_finite() { Ok(x) } else { Err(bad()) };
    }
    let s = s.replace('π', "pi");
    let (head, tail) = s.split_once("pi").ok_or_else(bad)?;
    let head = head.trim_end_matches('*');
    let coeff = match head {
        "" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let denom = match tail {
        "" => 1.0,
        t => t.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    let value = coeff * PI / denom;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}
