//! JSON files for states and channels.
//!
//! Complex numbers are `[re, im]` pairs and matrices are flat row-major lists.
//!
//! ```json
//! {"dim": 2, "amplitudes": [[0.7071067811865476, 0], [0.7071067811865476, 0]]}
//! {"dim": 2, "density": [[1, 0], [0, 0], [0, 0], [0, 0]]}
//! {"dim": 2, "kraus": [[...4 pairs...], [...4 pairs...]], "tol": 1e-9}
//! {"unitary": [...16 pairs...], "controller_state": [[1, 0], [0, 0]], "controller_dim": 2}
//! ```
//!
//! The unitary form may also carry `controller_basis` (a list of vectors);
//! the computational basis is used otherwise. Parse errors name the offending
//! field, e.g. `kraus[1][3]`.

use serde_json::{json, Map, Value};

use crate::channels::{computational_basis, kraus_from_unitary, KrausChannel, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::states::{DensityOperator, PureState};

/// A state read from a file, kept pure when it was given as amplitudes.
#[derive(Clone, Debug)]
pub enum StateFile {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl StateFile {
    pub fn dim(&self) -> usize {
        match self {
            StateFile::Pure(p) => p.dim(),
            StateFile::Mixed(m) => m.dim(),
        }
    }

    pub fn to_density(&self) -> DensityOperator {
        match self {
            StateFile::Pure(p) => p.to_density(),
            StateFile::Mixed(m) => m.clone(),
        }
    }

    pub fn into_pure(self) -> Option<PureState> {
        match self {
            StateFile::Pure(p) => Some(p),
            StateFile::Mixed(_) => None,
        }
    }
}

fn format_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Format {
        field: field.into(),
        message: message.into(),
    }
}

fn wrap(field: &str, err: Error) -> Error {
    match err {
        Error::Format { .. } => err,
        other => format_err(field, other.to_string()),
    }
}

pub(crate) fn parse_document(text: &str) -> Result<Map<String, Value>> {
    let value: Value = serde_json::from_str(text).map_err(|e| format_err("<document>", e.to_string()))?;
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(format_err("<document>", "expected a JSON object")),
    }
}

fn get_usize(obj: &Map<String, Value>, field: &str) -> Result<usize> {
    let v = obj.get(field).ok_or_else(|| format_err(field, "missing"))?;
    v.as_u64()
        .filter(|&n| n > 0)
        .map(|n| n as usize)
        .ok_or_else(|| format_err(field, "expected a positive integer"))
}

fn get_f64(obj: &Map<String, Value>, field: &str) -> Result<Option<f64>> {
    match obj.get(field) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .map(Some)
            .ok_or_else(|| format_err(field, "expected a finite number")),
    }
}

fn complex(v: &Value, field: &str) -> Result<C64> {
    let pair = v.as_array().ok_or_else(|| format_err(field, "expected an [re, im] pair"))?;
    if pair.len() != 2 {
        return Err(format_err(field, format!("expected 2 numbers, found {}", pair.len())));
    }
    let part = |x: &Value| x.as_f64().filter(|f| f.is_finite());
    match (part(&pair[0]), part(&pair[1])) {
        (Some(re), Some(im)) => Ok(C64::new(re, im)),
        _ => Err(format_err(field, "expected finite numbers")),
    }
}

fn complex_list(v: &Value, field: &str, expected_len: Option<usize>) -> Result<Vec<C64>> {
    let items = v.as_array().ok_or_else(|| format_err(field, "expected a list of [re, im] pairs"))?;
    if let Some(n) = expected_len {
        if items.len() != n {
            return Err(format_err(field, format!("expected {n} entries, found {}", items.len())));
        }
    }
    items
        .iter()
        .enumerate()
        .map(|(i, x)| complex(x, &format!("{field}[{i}]")))
        .collect()
}

fn square_matrix(v: &Value, field: &str, dim: Option<usize>) -> Result<ComplexMatrix> {
    let entries = complex_list(v, field, dim.map(|d| d * d))?;
    let d = dim.unwrap_or_else(|| (entries.len() as f64).sqrt().round() as usize);
    if d == 0 || d * d != entries.len() {
        return Err(format_err(field, format!("{} entries do not form a square matrix", entries.len())));
    }
    ComplexMatrix::from_row_major(d, d, entries).map_err(|e| wrap(field, e))
}

fn pairs(values: &[C64]) -> Value {
    Value::Array(values.iter().map(|z| json!([z.re, z.im])).collect())
}

/// Reads a state from its JSON text.
pub fn parse_state(text: &str) -> Result<StateFile> {
    state_from_object(&parse_document(text)?, "")
}

pub(crate) fn state_from_object(obj: &Map<String, Value>, prefix: &str) -> Result<StateFile> {
    let name = |f: &str| format!("{prefix}{f}");
    let dim = get_usize(obj, "dim").map_err(|_| format_err(name("dim"), "missing or not a positive integer"))?;
    match (obj.get("amplitudes"), obj.get("density")) {
        (Some(a), None) => {
            let field = name("amplitudes");
            let amps = complex_list(a, &field, Some(dim))?;
            PureState::new(amps).map(StateFile::Pure).map_err(|e| wrap(&field, e))
        }
        (None, Some(m)) => {
            let field = name("density");
            let matrix = square_matrix(m, &field, Some(dim))?;
            DensityOperator::new(matrix).map(StateFile::Mixed).map_err(|e| wrap(&field, e))
        }
        (Some(_), Some(_)) => Err(format_err(name("amplitudes"), "give either amplitudes or density, not both")),
        (None, None) => Err(format_err(name("amplitudes"), "missing (or give density)")),
    }
}

pub fn pure_state_to_json(state: &PureState) -> String {
    json!({"dim": state.dim(), "amplitudes": pairs(state.amplitudes())}).to_string()
}

pub fn density_to_json(rho: &DensityOperator) -> String {
    json!({"dim": rho.dim(), "density": pairs(&rho.matrix().row_major())}).to_string()
}

/// Reads a channel from its JSON text, reducing the unitary form at load time.
pub fn parse_channel(text: &str) -> Result<KrausChannel> {
    let obj = parse_document(text)?;
    let tol = get_f64(&obj, "tol")?.unwrap_or(DEFAULT_TOL);
    if tol <= 0.0 {
        return Err(format_err("tol", "must be positive"));
    }
    let channel = match (obj.get("kraus"), obj.get("unitary")) {
        (Some(k), None) => {
            let dim = get_usize(&obj, "dim")?;
            let list = k.as_array().ok_or_else(|| format_err("kraus", "expected a list of matrices"))?;
            if list.is_empty() {
                return Err(format_err("kraus", "needs at least one operator"));
            }
            let ops = list
                .iter()
                .enumerate()
                .map(|(i, m)| square_matrix(m, &format!("kraus[{i}]"), Some(dim)))
                .collect::<Result<Vec<_>>>()?;
            KrausChannel::new(ops, tol).map_err(|e| wrap("kraus", e))?
        }
        (None, Some(u)) => {
            let n = get_usize(&obj, "controller_dim")?;
            let unitary = square_matrix(u, "unitary", None)?;
            if let Some(dim) = obj.get("dim") {
                let d = dim.as_u64().ok_or_else(|| format_err("dim", "expected a positive integer"))? as usize;
                if d * n != unitary.rows() {
                    return Err(format_err("dim", format!("dim × controller_dim must equal {}", unitary.rows())));
                }
            }
            let state_value = obj.get("controller_state").ok_or_else(|| format_err("controller_state", "missing"))?;
            let state = PureState::new(complex_list(state_value, "controller_state", Some(n))?)
                .map_err(|e| wrap("controller_state", e))?;
            let basis = match obj.get("controller_basis") {
                None => computational_basis(n),
                Some(b) => {
                    let list = b.as_array().ok_or_else(|| format_err("controller_basis", "expected a list of vectors"))?;
                    list.iter()
                        .enumerate()
                        .map(|(i, v)| {
                            let field = format!("controller_basis[{i}]");
                            PureState::new(complex_list(v, &field, Some(n))?).map_err(|e| wrap(&field, e))
                        })
                        .collect::<Result<Vec<_>>>()?
                }
            };
            kraus_from_unitary(&unitary, &state, &basis)
                .map_err(|e| wrap("unitary", e))?
                .with_tol(tol)
        }
        (Some(_), Some(_)) => return Err(format_err("kraus", "give either kraus or unitary, not both")),
        (None, None) => return Err(format_err("kraus", "missing (or give unitary)")),
    };
    Ok(channel)
}

pub fn channel_to_json(channel: &KrausChannel) -> String {
    let ops: Vec<Value> = channel.operators().iter().map(|m| pairs(&m.row_major())).collect();
    json!({"dim": channel.dim(), "kraus": ops, "tol": channel.tol()}).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::weak_swap_channel;

    fn field_of(err: Error) -> String {
        match err {
            Error::Format { field, .. } => field,
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    #[test]
    fn state_round_trip() {
        let s = PureState::from_real(&[0.6, 0.8]).unwrap();
        let back = parse_state(&pure_state_to_json(&s)).unwrap().into_pure().unwrap();
        assert_eq!(back.amplitudes(), s.amplitudes());
        let rho = DensityOperator::maximally_mixed(3);
        let back = parse_state(&density_to_json(&rho)).unwrap().to_density();
        assert_eq!(back.matrix().max_abs_diff(rho.matrix()), 0.0);
    }

    #[test]
    fn channel_round_trip() {
        let ch = weak_swap_channel(0.7, 3, 1).unwrap();
        let back = parse_channel(&channel_to_json(&ch)).unwrap();
        for (a, b) in ch.operators().iter().zip(back.operators()) {
            assert_eq!(a.max_abs_diff(b), 0.0);
        }
    }

    #[test]
    fn unitary_form_reduces() {
        let text = r#"{"unitary": [[1,0],[0,0],[0,0],[0,0], [0,0],[0,0],[1,0],[0,0],
                                   [0,0],[1,0],[0,0],[0,0], [0,0],[0,0],[0,0],[1,0]],
                       "controller_state": [[1,0],[0,0]], "controller_dim": 2}"#;
        let ch = parse_channel(text).unwrap();
        // A full swap with the controller in |0⟩ resets the system to |0⟩.
        let out = ch.apply(&PureState::basis(2, 1).to_density()).unwrap();
        assert!((out.matrix().get(0, 0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn errors_name_fields() {
        assert_eq!(field_of(parse_state(r#"{"amplitudes": [[1,0]]}"#).unwrap_err()), "dim");
        assert_eq!(field_of(parse_state(r#"{"dim": 2, "amplitudes": [[1,0],[0]]}"#).unwrap_err()), "amplitudes[1]");
        assert_eq!(field_of(parse_state(r#"{"dim": 2, "amplitudes": [[1,0],[1,0]]}"#).unwrap_err()), "amplitudes");
        assert_eq!(field_of(parse_channel(r#"{"dim": 2, "kraus": [[[1,0],[0,0],[0,0]]]}"#).unwrap_err()), "kraus[0]");
        assert_eq!(field_of(parse_channel(r#"{"dim": 2, "kraus": [[[1,0],[0,0],[0,0],[0,0]]]}"#).unwrap_err()), "kraus");
        assert_eq!(field_of(parse_channel(r#"{"dim": 2, "kraus": "#).unwrap_err()), "<document>");
    }
}
