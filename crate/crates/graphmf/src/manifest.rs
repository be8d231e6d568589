//! JSON manifest ingestion and emission.
//!
//! One manifest file describes one manifold. Top-level keys: `n`,
//! `extended` (optional, default false), `pieces`, `gluings`, plus the
//! optional extension blocks `theta` (finite matrix groups per piece, for
//! gluing-pattern equivalence) and `homology` (boundary homology data for
//! the circle-bundle obstruction). Integer entries may be JSON numbers of
//! any size or decimal strings. Unknown keys are rejected.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::model::{Gluing, GraphManifold, Piece};

/// Raw, structurally-parsed manifest. Semantic validation happens in
/// [`crate::model::validate`].
#[derive(Clone, Debug)]
pub struct Manifest {
    pub n: usize,
    pub extended: bool,
    pub pieces: Vec<Piece>,
    pub gluings: Vec<Gluing>,
    pub theta: BTreeMap<String, Vec<IntMatrix>>,
    pub homology: Option<HomologyBlock>,
}

/// User-supplied homology input: the matrix of the map induced on first
/// homology by the inclusion of the boundary (free parts only).
#[derive(Clone, Debug, serde::Serialize)]
pub struct HomologyBlock {
    pub h1_boundary_rank: usize,
    pub h1_interior_rank: usize,
    pub i_star: IntMatrix,
}

pub fn bigint_from_json(v: &Value) -> std::result::Result<BigInt, String> {
    match v {
        Value::Number(n) => n
            .to_string()
            .parse::<BigInt>()
            .map_err(|_| format!("not an integer: {}", n)),
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|_| format!("not an integer: {:?}", s)),
        other => Err(format!("expected integer or decimal string, got {}", other)),
    }
}

pub fn bigint_to_json(v: &BigInt) -> Value {
    Value::Number(serde_json::from_str(&v.to_string()).expect("integer literal"))
}

fn usize_from_json(v: &Value, what: &str) -> Result<usize> {
    let b = bigint_from_json(v).map_err(|e| Error::input(format!("{}: {}", what, e)))?;
    let (sign, digits) = b.to_u64_digits();
    if sign == num_bigint::Sign::Minus || digits.len() > 1 {
        return Err(Error::input(format!("{}: out of range", what)));
    }
    Ok(digits.first().copied().unwrap_or(0) as usize)
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a serde_json::Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::input(format!("{} must be a JSON object", what)))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::input(format!("{} must be a JSON array", what)))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::input(format!("{} must be a string", what)))
}

fn reject_unknown(obj: &serde_json::Map<String, Value>, allowed: &[&str], ctx: &str) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::input(format!("unknown key {:?} in {}", key, ctx)));
        }
    }
    Ok(())
}

pub fn matrix_from_json(v: &Value, what: &str) -> Result<IntMatrix> {
    let rows = as_array(v, what)?;
    let ncols = rows
        .first()
        .map(|r| as_array(r, what).map(|a| a.len()))
        .transpose()?
        .unwrap_or(0);
    let mut m = IntMatrix::zero(rows.len(), ncols);
    for (i, row) in rows.iter().enumerate() {
        let row = as_array(row, what)?;
        if row.len() != ncols {
            return Err(Error::input(format!("{}: ragged rows", what)));
        }
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] =
                bigint_from_json(e).map_err(|e| Error::input(format!("{}: {}", what, e)))?;
        }
    }
    Ok(m)
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| bigint_to_json(&m[(i, j)])).collect()))
            .collect(),
    )
}

/// Parse a manifest from its JSON text.
pub fn parse(text: &str) -> Result<Manifest> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| Error::input(format!("invalid JSON: {}", e)))?;
    let obj = as_object(&root, "manifest")?;
    reject_unknown(
        obj,
        &["n", "extended", "pieces", "gluings", "theta", "homology"],
        "manifest",
    )?;

    let n = usize_from_json(
        obj.get("n")
            .ok_or_else(|| Error::input("manifest is missing key \"n\""))?,
        "n",
    )?;
    let extended = match obj.get("extended") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(Error::input("\"extended\" must be a boolean")),
    };

    let mut pieces = Vec::new();
    for (k, pv) in as_array(
        obj.get("pieces")
            .ok_or_else(|| Error::input("manifest is missing key \"pieces\""))?,
        "pieces",
    )?
    .iter()
    .enumerate()
    {
        let p = as_object(pv, &format!("pieces[{}]", k))?;
        reject_unknown(
            p,
            &["id", "base_dim", "fiber_dim", "cusps", "label"],
            &format!("pieces[{}]", k),
        )?;
        let id = as_str(
            p.get("id")
                .ok_or_else(|| Error::input(format!("pieces[{}] missing \"id\"", k)))?,
            "piece id",
        )?
        .to_string();
        let base_dim = usize_from_json(
            p.get("base_dim")
                .ok_or_else(|| Error::input(format!("piece {:?} missing \"base_dim\"", id)))?,
            "base_dim",
        )?;
        let fiber_dim = usize_from_json(
            p.get("fiber_dim")
                .ok_or_else(|| Error::input(format!("piece {:?} missing \"fiber_dim\"", id)))?,
            "fiber_dim",
        )?;
        let cusps = as_array(
            p.get("cusps")
                .ok_or_else(|| Error::input(format!("piece {:?} missing \"cusps\"", id)))?,
            "cusps",
        )?
        .iter()
        .map(|c| as_str(c, "cusp id").map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
        let label = match p.get("label") {
            None | Some(Value::Null) => None,
            Some(v) => Some(as_str(v, "label")?.to_string()),
        };
        pieces.push(Piece {
            id,
            base_dim,
            fiber_dim,
            cusps,
            label,
        });
    }

    let mut gluings = Vec::new();
    for (k, gv) in as_array(
        obj.get("gluings")
            .ok_or_else(|| Error::input("manifest is missing key \"gluings\""))?,
        "gluings",
    )?
    .iter()
    .enumerate()
    {
        let g = as_object(gv, &format!("gluings[{}]", k))?;
        reject_unknown(g, &["from", "to", "matrix"], &format!("gluings[{}]", k))?;
        let endpoint = |key: &str| -> Result<(String, String)> {
            let pair = as_array(
                g.get(key)
                    .ok_or_else(|| Error::input(format!("gluings[{}] missing {:?}", k, key)))?,
                key,
            )?;
            if pair.len() != 2 {
                return Err(Error::input(format!(
                    "gluings[{}].{} must be [piece_id, cusp_id]",
                    k, key
                )));
            }
            Ok((
                as_str(&pair[0], "piece id")?.to_string(),
                as_str(&pair[1], "cusp id")?.to_string(),
            ))
        };
        let from = endpoint("from")?;
        let to = endpoint("to")?;
        let matrix = matrix_from_json(
            g.get("matrix")
                .ok_or_else(|| Error::input(format!("gluings[{}] missing \"matrix\"", k)))?,
            &format!("gluings[{}].matrix", k),
        )?;
        gluings.push(Gluing { from, to, matrix });
    }

    let mut theta = BTreeMap::new();
    if let Some(tv) = obj.get("theta") {
        for (piece_id, mats) in as_object(tv, "theta")? {
            let mats = as_array(mats, "theta entry")?
                .iter()
                .map(|m| matrix_from_json(m, &format!("theta[{:?}]", piece_id)))
                .collect::<Result<Vec<_>>>()?;
            theta.insert(piece_id.clone(), mats);
        }
    }

    let homology = match obj.get("homology") {
        None => None,
        Some(hv) => {
            let h = as_object(hv, "homology")?;
            reject_unknown(
                h,
                &["h1_boundary_rank", "h1_interior_rank", "i_star"],
                "homology",
            )?;
            let h1_boundary_rank = usize_from_json(
                h.get("h1_boundary_rank")
                    .ok_or_else(|| Error::input("homology missing \"h1_boundary_rank\""))?,
                "h1_boundary_rank",
            )?;
            let h1_interior_rank = usize_from_json(
                h.get("h1_interior_rank")
                    .ok_or_else(|| Error::input("homology missing \"h1_interior_rank\""))?,
                "h1_interior_rank",
            )?;
            let i_star = matrix_from_json(
                h.get("i_star")
                    .ok_or_else(|| Error::input("homology missing \"i_star\""))?,
                "homology.i_star",
            )?;
            if i_star.cols() != h1_boundary_rank || i_star.rows() != h1_interior_rank {
                return Err(Error::input(format!(
                    "homology.i_star is {}x{}, expected {}x{}",
                    i_star.rows(),
                    i_star.cols(),
                    h1_interior_rank,
                    h1_boundary_rank
                )));
            }
            Some(HomologyBlock {
                h1_boundary_rank,
                h1_interior_rank,
                i_star,
            })
        }
    };

    Ok(Manifest {
        n,
        extended,
        pieces,
        gluings,
        theta,
        homology,
    })
}

/// Parse and validate in one step.
pub fn load(text: &str) -> Result<GraphManifold> {
    crate::model::validate(&parse(text)?)
}

/// Emit the manifest JSON for a validated manifold (canonical layout,
/// deterministic for a given value).
pub fn to_json(m: &GraphManifold) -> Value {
    let pieces: Vec<Value> = m
        .pieces
        .iter()
        .map(|p| {
            let mut obj = serde_json::Map::new();
            obj.insert("id".into(), Value::String(p.id.clone()));
            obj.insert("base_dim".into(), Value::Number(p.base_dim.into()));
            obj.insert("fiber_dim".into(), Value::Number(p.fiber_dim.into()));
            obj.insert(
                "cusps".into(),
                Value::Array(p.cusps.iter().map(|c| Value::String(c.clone())).collect()),
            );
            if let Some(l) = &p.label {
                obj.insert("label".into(), Value::String(l.clone()));
            }
            Value::Object(obj)
        })
        .collect();
    let gluings: Vec<Value> = m
        .gluings
        .iter()
        .map(|g| {
            let mut obj = serde_json::Map::new();
            obj.insert(
                "from".into(),
                Value::Array(vec![
                    Value::String(g.from.0.clone()),
                    Value::String(g.from.1.clone()),
                ]),
            );
            obj.insert(
                "to".into(),
                Value::Array(vec![
                    Value::String(g.to.0.clone()),
                    Value::String(g.to.1.clone()),
                ]),
            );
            obj.insert("matrix".into(), matrix_to_json(&g.matrix));
            Value::Object(obj)
        })
        .collect();
    let mut root = serde_json::Map::new();
    root.insert("n".into(), Value::Number(m.n.into()));
    if m.extended {
        root.insert("extended".into(), Value::Bool(true));
    }
    root.insert("pieces".into(), Value::Array(pieces));
    root.insert("gluings".into(), Value::Array(gluings));
    Value::Object(root)
}
