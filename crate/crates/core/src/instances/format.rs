//! One JSON object per line: `{"kind": ..., "params": {...}, <payload>}`.
//!
//! Bit vectors are 0/1 strings with coordinate 0 leftmost. Real coordinates
//! use the shortest decimal that round-trips to the same 64-bit float. A
//! bundle is a header line followed by `count` item lines that carry an
//! extra `merlin` field.

use super::types::*;
use crate::bits::BitVec;
use crate::error::{Error, Result};
use serde_json::{json, Map, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Instance(Instance),
    OvBundle(OvBundle),
    ThreeOvBundle(ThreeOvBundle),
}

fn bits_json(vs: &[BitVec]) -> Value {
    Value::Array(vs.iter().map(|v| Value::String(v.to_bit_string())).collect())
}

fn reals_json(vs: &[Vec<f64>]) -> Value {
    Value::Array(
        vs.iter()
            .map(|p| Value::Array(p.iter().map(|&c| json!(c)).collect()))
            .collect(),
    )
}

fn to_value(inst: &Instance) -> Value {
    let mut o = Map::new();
    o.insert("kind".into(), json!(inst.kind().as_str()));
    let (params, payload): (Value, Vec<(&str, Value)>) = match inst {
        Instance::Ov(b) | Instance::MinIp(b) | Instance::MaxIp(b) => (
            json!({"d": b.d, "n_a": b.a.len(), "n_b": b.b.len()}),
            vec![("a", bits_json(&b.a)), ("b", bits_json(&b.b))],
        ),
        Instance::ExactIp(e) => (
            json!({"d": e.base.d, "n_a": e.base.a.len(), "n_b": e.base.b.len(), "m": e.m}),
            vec![("a", bits_json(&e.base.a)), ("b", bits_json(&e.base.b))],
        ),
        Instance::Gap(g) => (
            json!({"d": g.base.d, "n_a": g.base.a.len(), "n_b": g.base.b.len(), "tau": g.tau}),
            vec![("a", bits_json(&g.base.a)), ("b", bits_json(&g.base.b))],
        ),
        Instance::Bcp(r) | Instance::Fp(r) => {
            let mut params = json!({"d": r.d, "p": r.p, "n_a": r.a.len()});
            let mut payload = vec![("a", reals_json(&r.a))];
            if let Some(b) = &r.b {
                params["n_b"] = json!(b.len());
                payload.push(("b", reals_json(b)));
            }
            (params, payload)
        }
        Instance::Jaccard(s) => (
            json!({"universe": s.universe, "n_a": s.a.len(), "n_b": s.b.len()}),
            vec![("a", json!(s.a)), ("b", json!(s.b))],
        ),
        Instance::Hopcroft(h) => (
            json!({"d": h.d, "bound": h.bound, "n_a": h.a.len(), "n_b": h.b.len()}),
            vec![("a", json!(h.a)), ("b", json!(h.b))],
        ),
        Instance::ThreeOv(t) => (
            json!({"d": t.d, "n_a": t.a.len(), "n_b": t.b.len(), "n_c": t.c.len()}),
            vec![("a", bits_json(&t.a)), ("b", bits_json(&t.b)), ("c", bits_json(&t.c))],
        ),
        Instance::ThreeSum(t) => (
            json!({"bound": t.bound, "n_a": t.a.len(), "n_b": t.b.len(), "n_c": t.c.len()}),
            vec![("a", json!(t.a)), ("b", json!(t.b)), ("c", json!(t.c))],
        ),
        Instance::MaxSat(c) => (
            json!({"num_vars": c.num_vars, "num_clauses": c.clauses.len()}),
            vec![("clauses", json!(c.clauses))],
        ),
    };
    o.insert("params".into(), params);
    for (k, v) in payload {
        o.insert(k.into(), v);
    }
    Value::Object(o)
}

/// One line, no trailing newline.
pub fn serialize(inst: &Instance) -> String {
    to_value(inst).to_string()
}

/// Header line plus one line per item, newline-terminated.
pub fn serialize_bundle<T: BundleTarget + IntoInstance>(bundle: &OrBundle<T>) -> String {
    let header = json!({
        "bundle": bundle.kind().as_str(),
        "provenance": bundle.provenance,
        "count": bundle.items.len(),
        "dim": bundle.dim,
    });
    let mut out = header.to_string();
    out.push('\n');
    for item in &bundle.items {
        let mut v = to_value(&item.instance.clone().into_instance());
        v.as_object_mut().unwrap().insert("merlin".into(), json!(item.merlin));
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

pub trait IntoInstance {
    fn into_instance(self) -> Instance;
}

impl IntoInstance for BooleanPairInstance {
    fn into_instance(self) -> Instance {
        Instance::Ov(self)
    }
}

impl IntoInstance for TripleInstance {
    fn into_instance(self) -> Instance {
        Instance::ThreeOv(self)
    }
}

struct Ctx {
    line: usize,
}

impl Ctx {
    fn err(&self, field: impl Into<String>, msg: impl Into<String>) -> Error {
        Error::Format { line: self.line, field: field.into(), msg: msg.into() }
    }

    fn get<'a>(&self, o: &'a Map<String, Value>, field: &str, path: &str) -> Result<&'a Value> {
        o.get(field).ok_or_else(|| self.err(path, "missing"))
    }

    fn uint(&self, o: &Map<String, Value>, field: &str, path: &str) -> Result<u64> {
        self.get(o, field, path)?.as_u64().ok_or_else(|| self.err(path, "expected a non-negative integer"))
    }

    fn int(&self, v: &Value, path: &str) -> Result<i64> {
        v.as_i64().ok_or_else(|| self.err(path, "expected an integer"))
    }

    fn array<'a>(&self, v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
        v.as_array().ok_or_else(|| self.err(path, "expected an array"))
    }

    fn count(&self, params: &Map<String, Value>, name: &str, actual: usize) -> Result<()> {
        if let Some(v) = params.get(name) {
            let n = v.as_u64().ok_or_else(|| self.err(format!("params.{name}"), "expected a non-negative integer"))?;
            if n as usize != actual {
                return Err(self.err(format!("params.{name}"), format!("declares {n} items but payload has {actual}")));
            }
        }
        Ok(())
    }

    fn bits(&self, o: &Map<String, Value>, field: &str, d: usize) -> Result<Vec<BitVec>> {
        let arr = self.array(self.get(o, field, field)?, field)?;
        arr.iter()
            .enumerate()
            .map(|(i, v)| {
                let path = format!("{field}[{i}]");
                let s = v.as_str().ok_or_else(|| self.err(&path, "expected a 0/1 string"))?;
                let bv = BitVec::parse_bit_string(s).ok_or_else(|| self.err(&path, "characters other than 0/1"))?;
                if bv.len() != d {
                    return Err(self.err(&path, format!("length {} differs from d = {d}", bv.len())));
                }
                Ok(bv)
            })
            .collect()
    }

    fn ints(&self, v: &Value, path: &str) -> Result<Vec<i64>> {
        self.array(v, path)?
            .iter()
            .enumerate()
            .map(|(i, x)| self.int(x, &format!("{path}[{i}]")))
            .collect()
    }

    fn int_rows(&self, o: &Map<String, Value>, field: &str) -> Result<Vec<Vec<i64>>> {
        let arr = self.array(self.get(o, field, field)?, field)?;
        arr.iter().enumerate().map(|(i, v)| self.ints(v, &format!("{field}[{i}]"))).collect()
    }

    fn real_rows(&self, o: &Map<String, Value>, field: &str, d: usize) -> Result<Vec<Vec<f64>>> {
        let arr = self.array(self.get(o, field, field)?, field)?;
        arr.iter()
            .enumerate()
            .map(|(i, v)| {
                let path = format!("{field}[{i}]");
                let row = self.array(v, &path)?;
                if row.len() != d {
                    return Err(self.err(&path, format!("dimension {} differs from d = {d}", row.len())));
                }
                row.iter()
                    .enumerate()
                    .map(|(j, c)| c.as_f64().ok_or_else(|| self.err(format!("{path}[{j}]"), "expected a number")))
                    .collect()
            })
            .collect()
    }

    fn wrap(&self, r: Result<Instance>) -> Result<Instance> {
        r.map_err(|e| match e {
            Error::Invalid(msg) => self.err("payload", msg),
            other => other,
        })
    }
}

fn from_value(v: &Value, line: usize) -> Result<Instance> {
    let cx = Ctx { line };
    let o = v.as_object().ok_or_else(|| cx.err("<root>", "expected a JSON object"))?;
    let kind_s = cx.get(o, "kind", "kind")?.as_str().ok_or_else(|| cx.err("kind", "expected a string"))?;
    let kind: ProblemKind = kind_s.parse().map_err(|e: String| cx.err("kind", e))?;
    let params = cx
        .get(o, "params", "params")?
        .as_object()
        .ok_or_else(|| cx.err("params", "expected an object"))?;
    let d = || -> Result<usize> { Ok(cx.uint(params, "d", "params.d")? as usize) };
    let inst = match kind {
        ProblemKind::Ov
        | ProblemKind::MinIp
        | ProblemKind::MaxIp
        | ProblemKind::ExactIp
        | ProblemKind::GapMin
        | ProblemKind::GapMax => {
            let d = d()?;
            let (a, b) = (cx.bits(o, "a", d)?, cx.bits(o, "b", d)?);
            cx.count(params, "n_a", a.len())?;
            cx.count(params, "n_b", b.len())?;
            let base = cx.wrap(BooleanPairInstance::new(d, a, b).map(Instance::Ov))?;
            let Instance::Ov(base) = base else { unreachable!() };
            match kind {
                ProblemKind::Ov => Instance::Ov(base),
                ProblemKind::MinIp => Instance::MinIp(base),
                ProblemKind::MaxIp => Instance::MaxIp(base),
                ProblemKind::ExactIp => {
                    let m = cx.uint(params, "m", "params.m")? as usize;
                    ExactIpInstance::new(base, m)
                        .map(Instance::ExactIp)
                        .map_err(|e| cx.err("params.m", e.to_string()))?
                }
                _ => {
                    let tau = cx.uint(params, "tau", "params.tau")? as usize;
                    let side = if kind == ProblemKind::GapMin { GapSide::Min } else { GapSide::Max };
                    GapInstance::new(base, tau, side)
                        .map(Instance::Gap)
                        .map_err(|e| cx.err("params.tau", e.to_string()))?
                }
            }
        }
        ProblemKind::Bcp | ProblemKind::Fp => {
            let d = d()?;
            let p = cx
                .get(params, "p", "params.p")?
                .as_f64()
                .ok_or_else(|| cx.err("params.p", "expected a number"))?;
            let a = cx.real_rows(o, "a", d)?;
            let b = if o.contains_key("b") { Some(cx.real_rows(o, "b", d)?) } else { None };
            cx.count(params, "n_a", a.len())?;
            if let Some(b) = &b {
                cx.count(params, "n_b", b.len())?;
            }
            let r = cx.wrap(RealPairInstance::new(d, p, a, b).map(Instance::Bcp))?;
            let Instance::Bcp(r) = r else { unreachable!() };
            if kind == ProblemKind::Bcp {
                Instance::Bcp(r)
            } else {
                Instance::Fp(r)
            }
        }
        ProblemKind::Jaccard => {
            let u = cx.uint(params, "universe", "params.universe")?;
            let u = u32::try_from(u).map_err(|_| cx.err("params.universe", "too large"))?;
            let conv = |rows: Vec<Vec<i64>>, field: &str| -> Result<Vec<Vec<u32>>> {
                rows.into_iter()
                    .enumerate()
                    .map(|(i, r)| {
                        r.into_iter()
                            .map(|e| u32::try_from(e).map_err(|_| cx.err(format!("{field}[{i}]"), "element out of range")))
                            .collect()
                    })
                    .collect()
            };
            let a = conv(cx.int_rows(o, "a")?, "a")?;
            let b = conv(cx.int_rows(o, "b")?, "b")?;
            cx.count(params, "n_a", a.len())?;
            cx.count(params, "n_b", b.len())?;
            cx.wrap(SetFamilyInstance::new(u, a, b).map(Instance::Jaccard))?
        }
        ProblemKind::Hopcroft => {
            let d = d()?;
            let bound = cx.int(cx.get(params, "bound", "params.bound")?, "params.bound")?;
            let (a, b) = (cx.int_rows(o, "a")?, cx.int_rows(o, "b")?);
            cx.count(params, "n_a", a.len())?;
            cx.count(params, "n_b", b.len())?;
            cx.wrap(IntegerPairInstance::new(d, bound, a, b).map(Instance::Hopcroft))?
        }
        ProblemKind::ThreeOv => {
            let d = d()?;
            let (a, b, c) = (cx.bits(o, "a", d)?, cx.bits(o, "b", d)?, cx.bits(o, "c", d)?);
            cx.count(params, "n_a", a.len())?;
            cx.count(params, "n_b", b.len())?;
            cx.count(params, "n_c", c.len())?;
            cx.wrap(TripleInstance::new(d, a, b, c).map(Instance::ThreeOv))?
        }
        ProblemKind::ThreeSum => {
            let bound = cx.int(cx.get(params, "bound", "params.bound")?, "params.bound")?;
            let a = cx.ints(cx.get(o, "a", "a")?, "a")?;
            let b = cx.ints(cx.get(o, "b", "b")?, "b")?;
            let c = cx.ints(cx.get(o, "c", "c")?, "c")?;
            cx.count(params, "n_a", a.len())?;
            cx.count(params, "n_b", b.len())?;
            cx.count(params, "n_c", c.len())?;
            cx.wrap(ThreeSumInstance::new(bound, a, b, c).map(Instance::ThreeSum))?
        }
        ProblemKind::MaxSat => {
            let nv = cx.uint(params, "num_vars", "params.num_vars")?;
            let nv = u32::try_from(nv).map_err(|_| cx.err("params.num_vars", "too large"))?;
            let rows = cx.int_rows(o, "clauses")?;
            cx.count(params, "num_clauses", rows.len())?;
            let clauses = rows
                .into_iter()
                .enumerate()
                .map(|(i, r)| {
                    r.into_iter()
                        .map(|l| i32::try_from(l).map_err(|_| cx.err(format!("clauses[{i}]"), "literal out of range")))
                        .collect()
                })
                .collect::<Result<Vec<Vec<i32>>>>()?;
            cx.wrap(CnfInstance::new(nv, clauses).map(Instance::MaxSat))?
        }
    };
    Ok(inst)
}

fn json_line(text: &str, line: usize) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Format {
        line,
        field: "<json>".into(),
        msg: e.to_string(),
    })
}

/// Parses one instance line; `line` is used in error messages.
pub fn parse_line(text: &str, line: usize) -> Result<Instance> {
    from_value(&json_line(text, line)?, line)
}

/// Parses text holding exactly one instance (blank lines ignored).
pub fn parse(text: &str) -> Result<Instance> {
    let mut docs = parse_document(text)?;
    match (docs.len(), docs.pop()) {
        (1, Some(Document::Instance(i))) => Ok(i),
        _ => Err(Error::Format { line: 1, field: "<root>".into(), msg: "expected exactly one instance".into() }),
    }
}

/// Parses a stream of instances and bundles.
pub fn parse_document(text: &str) -> Result<Vec<Document>> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    while let Some((ln, l)) = lines.next() {
        let v = json_line(l, ln)?;
        let Some(kind) = v.get("bundle") else {
            out.push(Document::Instance(from_value(&v, ln)?));
            continue;
        };
        let cx = Ctx { line: ln };
        let o = v.as_object().unwrap();
        let count = cx.uint(o, "count", "count")? as usize;
        let dim = cx.uint(o, "dim", "dim")? as usize;
        let provenance = cx
            .get(o, "provenance", "provenance")?
            .as_str()
            .ok_or_else(|| cx.err("provenance", "expected a string"))?
            .to_string();
        let mut items = Vec::with_capacity(count);
        for _ in 0..count {
            let (iln, il) = lines.next().ok_or_else(|| cx.err("count", format!("bundle declares {count} items but input ended")))?;
            let iv = json_line(il, iln)?;
            let merlin = Ctx { line: iln }.uint(iv.as_object().ok_or_else(|| Ctx { line: iln }.err("<root>", "expected an object"))?, "merlin", "merlin")?;
            items.push((merlin, from_value(&iv, iln)?, iln));
        }
        match kind.as_str() {
            Some("ov") => {
                let mut b = OvBundle::new(provenance, dim);
                for (merlin, inst, iln) in items {
                    match inst {
                        Instance::Ov(x) if x.d == dim => b.push(merlin, x),
                        _ => return Err(Ctx { line: iln }.err("kind", format!("expected an ov instance of dimension {dim}"))),
                    }
                }
                out.push(Document::OvBundle(b));
            }
            Some("3ov") => {
                let mut b = ThreeOvBundle::new(provenance, dim);
                for (merlin, inst, iln) in items {
                    match inst {
                        Instance::ThreeOv(x) if x.d == dim => b.push(merlin, x),
                        _ => return Err(Ctx { line: iln }.err("kind", format!("expected a 3ov instance of dimension {dim}"))),
                    }
                }
                out.push(Document::ThreeOvBundle(b));
            }
            _ => return Err(cx.err("bundle", "expected \"ov\" or \"3ov\"")),
        }
    }
    Ok(out)
}
