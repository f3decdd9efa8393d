//! JSON encodings shared by the CLI and the HTTP service. Objects are emitted with sorted keys,
//! so `to_string` of an encoded value is canonical.

use crate::error::{GspError, Result};
use crate::gsp::{Arrow, Gsp, Potential};
use crate::linalg::{q_parse, q_to_string, Matrix, Q};
use crate::mutation::MutationReport;
use crate::poly::{IntPoly, SFRational};
use crate::reps::DecoratedRep;
use crate::seed::{find_skew_symmetrizer, ExchangeMatrix, FGPair};
use crate::species::{FiniteAbelianGroup, GroupSpecies};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

fn bad(what: &str) -> GspError {
    GspError::Invalid(format!("malformed JSON: {what}"))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(&format!("missing \"{key}\"")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(&format!("{what} must be an array")))
}

fn string<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| bad(&format!("{what} must be a string")))
}

fn uint(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| bad(&format!("{what} must be a nonnegative integer")))
}

fn int(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| bad(&format!("{what} must be an integer")))
}

fn bigint_to_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(x) => json!(x),
        None => json!(c.to_string()),
    }
}

fn bigint_from_json(v: &Value) -> Result<BigInt> {
    if let Some(x) = v.as_i64() {
        return Ok(BigInt::from(x));
    }
    string(v, "coeff")?.parse().map_err(|_| bad("coeff"))
}

fn rational_from_json(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => q_parse(s).ok_or_else(|| bad(&format!("rational {s}"))),
        Value::Number(_) => Ok(Q::from_integer(BigInt::from(int(v, "rational")?))),
        _ => Err(bad("rational must be \"p/q\"")),
    }
}

pub fn matrix_to_json(b: &ExchangeMatrix) -> Value {
    json!({"labels": b.labels, "rows": b.rows})
}

pub fn matrix_from_json(v: &Value) -> Result<ExchangeMatrix> {
    let rows: Vec<Vec<i64>> = array(field(v, "rows")?, "rows")?
        .iter()
        .map(|r| array(r, "row")?.iter().map(|x| int(x, "entry")).collect())
        .collect::<Result<_>>()?;
    let b = match v.get("labels") {
        Some(l) => {
            let labels = array(l, "labels")?.iter().map(|x| string(x, "label").map(String::from)).collect::<Result<_>>()?;
            ExchangeMatrix::with_labels(labels, rows)?
        }
        None => ExchangeMatrix::new(rows)?,
    };
    find_skew_symmetrizer(&b)?;
    Ok(b)
}

pub fn poly_to_json(p: &IntPoly) -> Value {
    Value::Array(p.terms().iter().map(|(e, c)| json!({"coeff": bigint_to_json(c), "exp": e})).collect())
}

pub fn poly_from_json(v: &Value, nvars: usize) -> Result<IntPoly> {
    let mut p = IntPoly::zero(nvars);
    for t in array(v, "polynomial")? {
        let exp: Vec<u32> = array(field(t, "exp")?, "exp")?.iter().map(|x| uint(x, "exponent").map(|e| e as u32)).collect::<Result<_>>()?;
        if exp.len() != nvars {
            return Err(bad("exponent length"));
        }
        p.add_term(exp, bigint_from_json(field(t, "coeff")?)?);
    }
    Ok(p)
}

pub fn sfrational_to_json(r: &SFRational) -> Value {
    json!({"num": poly_to_json(r.num()), "den": poly_to_json(r.den())})
}

pub fn sfrational_from_json(v: &Value, nvars: usize) -> Result<SFRational> {
    let den = poly_from_json(field(v, "den")?, nvars)?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(SFRational::new(poly_from_json(field(v, "num")?, nvars)?, den))
}

pub fn species_to_json(sp: &GroupSpecies) -> Value {
    let vertices: Vec<Value> = sp.labels.iter().zip(&sp.groups).map(|(l, g)| json!({"id": l, "group": g.factors})).collect();
    let mut bimodules = Vec::new();
    for i in 0..sp.size() {
        for j in 0..sp.size() {
            if sp.mult[i][j].iter().flatten().any(|&x| x > 0) {
                bimodules.push(json!({"from": sp.labels[i], "to": sp.labels[j], "mult": sp.mult[i][j]}));
            }
        }
    }
    json!({"vertices": vertices, "bimodules": bimodules})
}

pub fn species_from_json(v: &Value) -> Result<GroupSpecies> {
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    for x in array(field(v, "vertices")?, "vertices")? {
        labels.push(string(field(x, "id")?, "id")?.to_string());
        let f = array(field(x, "group")?, "group")?.iter().map(|d| uint(d, "group factor").map(|d| d as u32)).collect::<Result<_>>()?;
        groups.push(FiniteAbelianGroup::new(f)?);
    }
    let mut sp = GroupSpecies::empty(labels, groups);
    let index = |sp: &GroupSpecies, x: &Value| -> Result<usize> {
        let id = string(x, "vertex id")?;
        sp.labels.iter().position(|l| l == id).ok_or_else(|| GspError::VertexMismatch(format!("unknown vertex {id}")))
    };
    if let Some(bs) = v.get("bimodules") {
        for b in array(bs, "bimodules")? {
            let (i, j) = (index(&sp, field(b, "from")?)?, index(&sp, field(b, "to")?)?);
            let m = array(field(b, "mult")?, "mult")?
                .iter()
                .map(|r| array(r, "mult row")?.iter().map(|x| uint(x, "multiplicity").map(|x| x as u32)).collect())
                .collect::<Result<_>>()?;
            sp.set(i, j, m)?;
        }
    }
    Ok(sp)
}

pub fn potential_to_json(g: &Gsp) -> Value {
    let terms: Vec<Value> = g
        .potential
        .terms
        .iter()
        .map(|(w, c)| json!({"coeff": q_to_string(c), "cycle": w.iter().map(|&a| g.arrows[a as usize].id.clone()).collect::<Vec<_>>()}))
        .collect();
    json!({"N": g.trunc, "terms": terms})
}

/// Fills `g.potential` and `g.trunc` from the encoding; arrows must already be set.
pub fn potential_from_json(v: &Value, g: &mut Gsp) -> Result<()> {
    g.trunc = uint(field(v, "N")?, "N")? as usize;
    let mut s = Potential::zero();
    for t in array(field(v, "terms")?, "terms")? {
        let w: Vec<u32> = array(field(t, "cycle")?, "cycle")?
            .iter()
            .map(|a| {
                let id = string(a, "arrow id")?;
                g.arrow_index(id).ok_or_else(|| bad(&format!("unknown arrow {id}")))
            })
            .collect::<Result<_>>()?;
        s.add_cycle(&w, rational_from_json(field(t, "coeff")?)?);
    }
    g.potential = s;
    g.validate()
}

/// Species fields plus the character-level arrows and the potential.
pub fn gsp_to_json(g: &Gsp) -> Value {
    let sp = g.species();
    let mut v = species_to_json(&sp);
    let arrows: Vec<Value> = g.arrows.iter().map(|a| json!({"id": a.id, "from": sp.char_name(a.src), "to": sp.char_name(a.tgt)})).collect();
    v["arrows"] = Value::Array(arrows);
    v["potential"] = potential_to_json(g);
    v
}

/// Accepts a GSP encoding or a bare species (arrows then follow the species, `S = 0`).
pub fn gsp_from_json(v: &Value, default_trunc: usize) -> Result<Gsp> {
    let sp = species_from_json(v)?;
    let mut g = match v.get("arrows") {
        Some(list) => {
            let mut arrows = Vec::new();
            for a in array(list, "arrows")? {
                arrows.push(Arrow {
                    id: string(field(a, "id")?, "arrow id")?.to_string(),
                    src: sp.parse_char_name(string(field(a, "from")?, "from")?)?,
                    tgt: sp.parse_char_name(string(field(a, "to")?, "to")?)?,
                });
            }
            let g = Gsp { labels: sp.labels.clone(), groups: sp.groups.clone(), arrows, potential: Potential::zero(), trunc: default_trunc };
            if v.get("bimodules").is_some() && g.species() != sp {
                return Err(GspError::VertexMismatch("arrows do not match the bimodules".into()));
            }
            g
        }
        None => Gsp::from_species(&sp, default_trunc),
    };
    match v.get("potential") {
        Some(p) => potential_from_json(p, &mut g)?,
        None => g.validate()?,
    }
    Ok(g)
}

pub fn rep_to_json(g: &Gsp, r: &DecoratedRep) -> Value {
    let sp = g.frame();
    let mut dims = Map::new();
    let mut deco = Map::new();
    for c in 0..g.num_chars() {
        dims.insert(sp.char_name(c), json!(r.dims[c]));
        deco.insert(sp.char_name(c), json!(r.deco[c]));
    }
    let arrows: Vec<Value> = g
        .arrows
        .iter()
        .zip(&r.mats)
        .map(|(a, m)| {
            let rows: Vec<Vec<String>> = (0..r.dims[a.src]).map(|i| (0..r.dims[a.tgt]).map(|j| q_to_string(m.get(i, j))).collect()).collect();
            json!({"id": a.id, "matrix": rows})
        })
        .collect();
    json!({"dims": dims, "arrows": arrows, "decoration": deco})
}

pub fn rep_from_json(g: &Gsp, v: &Value) -> Result<DecoratedRep> {
    let sp = g.frame();
    let n = g.num_chars();
    let read = |key: &str| -> Result<Vec<usize>> {
        let mut out = vec![0; n];
        if let Some(obj) = v.get(key) {
            for (name, x) in obj.as_object().ok_or_else(|| bad(&format!("{key} must be an object")))? {
                out[sp.parse_char_name(name)?] = uint(x, key)? as usize;
            }
        }
        Ok(out)
    };
    let dims = read("dims")?;
    let deco = read("decoration")?;
    let mut mats: Vec<Matrix> = g.arrows.iter().map(|a| Matrix::zeros(dims[a.src], dims[a.tgt])).collect();
    if let Some(list) = v.get("arrows") {
        for a in array(list, "arrows")? {
            let id = string(field(a, "id")?, "arrow id")?;
            let idx = g.arrow_index(id).ok_or_else(|| bad(&format!("unknown arrow {id}")))? as usize;
            let (rows, cols) = (dims[g.arrows[idx].src], dims[g.arrows[idx].tgt]);
            let m: Vec<Vec<Q>> = array(field(a, "matrix")?, "matrix")?
                .iter()
                .map(|r| array(r, "matrix row")?.iter().map(rational_from_json).collect())
                .collect::<Result<_>>()?;
            if m.len() != rows || m.iter().any(|r| r.len() != cols) {
                return Err(GspError::Invalid(format!("matrix of {id} must be {rows}x{cols}")));
            }
            mats[idx] = Matrix::from_rows(m, cols);
        }
    }
    let r = DecoratedRep { dims, mats, deco };
    r.check_shape(g)?;
    Ok(r)
}

pub fn fg_to_json(p: &FGPair) -> Value {
    let names: Vec<String> = (1..=p.g.len()).map(|i| format!("z{i}")).collect();
    json!({"F": poly_to_json(&p.f), "F_text": p.f.render(&names), "g": p.g})
}

pub fn mutation_report_to_json(r: &MutationReport) -> Value {
    let red = r.reduced();
    let src = &r.reduction.source;
    let trivial: Vec<Value> = r
        .reduction
        .trivial_pairs
        .iter()
        .map(|&(a, b)| json!([src.arrows[a as usize].id, src.arrows[b as usize].id]))
        .collect();
    json!({
        "k": red.labels[r.k],
        "b_before": r.b_before.as_ref().map(matrix_to_json),
        "b_after": r.b_after.as_ref().map(matrix_to_json),
        "premutation": gsp_to_json(&r.premutation.gsp),
        "trivial_pairs": trivial,
        "reduced": gsp_to_json(red),
        "two_acyclic": r.two_acyclic,
    })
}

/// Canonical compact text: sorted keys, no whitespace.
pub fn canonical(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{c3_gsp, c3_matrix};
    use crate::species::c3_species;

    #[test]
    fn species_round_trip() {
        let sp = c3_species();
        let v = species_to_json(&sp);
        assert_eq!(species_from_json(&v).unwrap(), sp);
        assert_eq!(
            canonical(&v),
            r#"{"bimodules":[{"from":"1","mult":[[1]],"to":"2"},{"from":"2","mult":[[1,1]],"to":"3"}],"vertices":[{"group":[],"id":"1"},{"group":[],"id":"2"},{"group":[2],"id":"3"}]}"#
        );
    }

    #[test]
    fn gsp_and_matrix_round_trip() {
        let g = c3_gsp();
        let v = gsp_to_json(&g);
        assert_eq!(gsp_from_json(&v, 3).unwrap(), g);
        let b = c3_matrix();
        assert_eq!(matrix_from_json(&matrix_to_json(&b)).unwrap(), b);
    }

    #[test]
    fn poly_and_rational_round_trip() {
        let p = IntPoly::from_terms(2, [(vec![0, 0], BigInt::from(1)), (vec![1, 2], BigInt::from(3))]);
        assert_eq!(poly_from_json(&poly_to_json(&p), 2).unwrap(), p);
        let r = SFRational::new(p.clone(), IntPoly::var(2, 0));
        assert_eq!(sfrational_from_json(&sfrational_to_json(&r), 2).unwrap(), r);
    }

    #[test]
    fn rep_round_trip() {
        let g = c3_gsp();
        let neg = DecoratedRep::negative(&g, crate::reps::simple_deco(&g, 2));
        let (h, r) = crate::reps::mutate_rep(&g, &neg, 2).unwrap();
        assert!(r.total_dim() > 0);
        let v = rep_to_json(&h, &r);
        let back = rep_from_json(&h, &v).unwrap();
        assert_eq!(rep_to_json(&h, &back), v);
        assert_eq!(back.dims, r.dims);
    }

    #[test]
    fn malformed_inputs_are_errors() {
        assert!(matrix_from_json(&json!({"rows": [[0, 1], [1, 0]]})).is_err());
        assert!(species_from_json(&json!({"vertices": [{"id": "1"}]})).is_err());
        assert!(poly_from_json(&json!([{"coeff": 1, "exp": [1]}]), 2).is_err());
    }
}
