use crate::bits::BitVec;
use crate::error::{invalid, Result};
use crate::scalar::Real;
use std::fmt;
use std::str::FromStr;

/// Two lists of packed Boolean vectors of a common dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanPairInstance {
    pub d: usize,
    pub a: Vec<BitVec>,
    pub b: Vec<BitVec>,
}

impl BooleanPairInstance {
    pub fn new(d: usize, a: Vec<BitVec>, b: Vec<BitVec>) -> Result<Self> {
        let inst = BooleanPairInstance { d, a, b };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.is_empty() || self.b.is_empty() {
            return Err(invalid("A and B must be non-empty"));
        }
        check_dims(self.d, &self.a, "A")?;
        check_dims(self.d, &self.b, "B")
    }

    /// Parses `a` and `b` from 0/1 strings; test and example convenience.
    pub fn from_strs(a: &[&str], b: &[&str]) -> Result<Self> {
        let parse = |v: &[&str]| -> Result<Vec<BitVec>> {
            v.iter()
                .map(|s| BitVec::parse_bit_string(s).ok_or_else(|| invalid(format!("bad bit string {s:?}"))))
                .collect()
        };
        let (a, b) = (parse(a)?, parse(b)?);
        let d = a.first().map_or(0, BitVec::len);
        Self::new(d, a, b)
    }

    pub fn n(&self) -> usize {
        self.a.len().max(self.b.len())
    }
}

pub(crate) fn check_dims(d: usize, vs: &[BitVec], name: &str) -> Result<()> {
    match vs.iter().position(|v| v.len() != d) {
        Some(i) => Err(invalid(format!("{name}[{i}] has length {} but d = {d}", vs[i].len()))),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactIpInstance {
    pub base: BooleanPairInstance,
    pub m: usize,
}

impl ExactIpInstance {
    pub fn new(base: BooleanPairInstance, m: usize) -> Result<Self> {
        if m > base.d {
            return Err(invalid(format!("target m = {m} exceeds d = {}", base.d)));
        }
        Ok(ExactIpInstance { base, m })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GapSide {
    /// Distinguish MIN <= tau from MIN >= 2 tau.
    Min,
    /// Distinguish MAX >= 2 tau from MAX <= tau.
    Max,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapInstance {
    pub base: BooleanPairInstance,
    pub tau: usize,
    pub side: GapSide,
}

impl GapInstance {
    pub fn new(base: BooleanPairInstance, tau: usize, side: GapSide) -> Result<Self> {
        if tau > base.d {
            return Err(invalid(format!("tau = {tau} exceeds d = {}", base.d)));
        }
        Ok(GapInstance { base, tau, side })
    }
}

/// Points in R^d under the l_p norm. `b == None` means a single point set.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPairInstance<S> {
    pub d: usize,
    pub p: S,
    pub a: Vec<Vec<S>>,
    pub b: Option<Vec<Vec<S>>>,
}

impl<S: Real> RealPairInstance<S> {
    pub fn new(d: usize, p: S, a: Vec<Vec<S>>, b: Option<Vec<Vec<S>>>) -> Result<Self> {
        let inst = RealPairInstance { d, p, a, b };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let one = S::one();
        if !(self.p >= one && self.p <= one + one) {
            return Err(invalid(format!("p = {:?} outside [1, 2]", self.p)));
        }
        if self.a.is_empty() || self.b.as_ref().is_some_and(Vec::is_empty) {
            return Err(invalid("point sets must be non-empty"));
        }
        for (name, set) in [("A", Some(&self.a)), ("B", self.b.as_ref())] {
            for (i, pt) in set.into_iter().flatten().enumerate() {
                if pt.len() != self.d {
                    return Err(invalid(format!("{name}[{i}] has dimension {} but d = {}", pt.len(), self.d)));
                }
                if pt.iter().any(|c| !c.is_finite()) {
                    return Err(invalid(format!("{name}[{i}] has a non-finite coordinate")));
                }
            }
        }
        Ok(())
    }

    /// The second side of every pair: B, or A itself for single-set input.
    pub fn other(&self) -> &[Vec<S>] {
        self.b.as_deref().unwrap_or(&self.a)
    }

    pub fn single_set(&self) -> bool {
        self.b.is_none()
    }

    /// Cross pairs `(i, j)`; for a single set only `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nb = self.other().len();
        let single = self.single_set();
        (0..self.a.len()).flat_map(move |i| {
            let start = if single { i + 1 } else { 0 };
            (start..nb).map(move |j| (i, j))
        })
    }
}

/// Two families of subsets of {1..U}, each sorted without duplicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamilyInstance {
    pub universe: u32,
    pub a: Vec<Vec<u32>>,
    pub b: Vec<Vec<u32>>,
}

impl SetFamilyInstance {
    pub fn new(universe: u32, a: Vec<Vec<u32>>, b: Vec<Vec<u32>>) -> Result<Self> {
        let inst = SetFamilyInstance { universe, a, b };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.is_empty() || self.b.is_empty() {
            return Err(invalid("set families must be non-empty"));
        }
        for (name, fam) in [("A", &self.a), ("B", &self.b)] {
            for (i, s) in fam.iter().enumerate() {
                if s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid(format!("{name}[{i}] is not strictly increasing")));
                }
                if s.iter().any(|&e| e == 0 || e > self.universe) {
                    return Err(invalid(format!("{name}[{i}] has an element outside 1..={}", self.universe)));
                }
            }
        }
        Ok(())
    }
}

/// Integer vectors with entries in [-bound, bound].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerPairInstance {
    pub d: usize,
    pub bound: i64,
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
}

/// Largest supported entry bound; keeps every inner product inside i128.
pub const MAX_INTEGER_BOUND: i64 = 1 << 31;

impl IntegerPairInstance {
    pub fn new(d: usize, bound: i64, a: Vec<Vec<i64>>, b: Vec<Vec<i64>>) -> Result<Self> {
        let inst = IntegerPairInstance { d, bound, a, b };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0..=MAX_INTEGER_BOUND).contains(&self.bound) {
            return Err(invalid(format!("bound {} outside 0..={MAX_INTEGER_BOUND}", self.bound)));
        }
        if self.a.is_empty() || self.b.is_empty() {
            return Err(invalid("A and B must be non-empty"));
        }
        for (name, set) in [("A", &self.a), ("B", &self.b)] {
            for (i, v) in set.iter().enumerate() {
                if v.len() != self.d {
                    return Err(invalid(format!("{name}[{i}] has dimension {} but d = {}", v.len(), self.d)));
                }
                if v.iter().any(|e| e.abs() > self.bound) {
                    return Err(invalid(format!("{name}[{i}] has an entry outside [-{0}, {0}]", self.bound)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleInstance {
    pub d: usize,
    pub a: Vec<BitVec>,
    pub b: Vec<BitVec>,
    pub c: Vec<BitVec>,
}

impl TripleInstance {
    pub fn new(d: usize, a: Vec<BitVec>, b: Vec<BitVec>, c: Vec<BitVec>) -> Result<Self> {
        let inst = TripleInstance { d, a, b, c };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.is_empty() || self.b.is_empty() || self.c.is_empty() {
            return Err(invalid("A, B and C must be non-empty"));
        }
        check_dims(self.d, &self.a, "A")?;
        check_dims(self.d, &self.b, "B")?;
        check_dims(self.d, &self.c, "C")
    }
}

/// Integers in [-W/2, W/2) where `bound` is W.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeSumInstance {
    pub bound: i64,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
}

impl ThreeSumInstance {
    pub fn new(bound: i64, a: Vec<i64>, b: Vec<i64>, c: Vec<i64>) -> Result<Self> {
        let inst = ThreeSumInstance { bound, a, b, c };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bound < 2 || self.bound % 2 != 0 || self.bound > 1 << 60 {
            return Err(invalid(format!("bound {} must be even and in [2, 2^60]", self.bound)));
        }
        if self.a.is_empty() || self.b.is_empty() || self.c.is_empty() {
            return Err(invalid("A, B and C must be non-empty"));
        }
        let half = self.bound / 2;
        for (name, set) in [("A", &self.a), ("B", &self.b), ("C", &self.c)] {
            if let Some(i) = set.iter().position(|v| *v < -half || *v >= half) {
                return Err(invalid(format!("{name}[{i}] = {} outside [-{half}, {half})", set[i])));
            }
        }
        Ok(())
    }
}

/// CNF formula; literal `v` is variable v, `-v` its negation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfInstance {
    pub fn new(num_vars: u32, clauses: Vec<Vec<i32>>) -> Result<Self> {
        let inst = CnfInstance { num_vars, clauses };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(invalid(format!("clause {i} is empty")));
            }
            if c.iter().any(|&l| l == 0 || l.unsigned_abs() > self.num_vars) {
                return Err(invalid(format!("clause {i} references a variable outside 1..={}", self.num_vars)));
            }
        }
        Ok(())
    }

    /// Number of clauses satisfied by `assignment[v - 1]`.
    pub fn satisfied(&self, assignment: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
            .count()
    }
}

/// Target kinds an [`OrBundle`] can carry.
pub trait BundleTarget: Clone {
    const KIND: BundleKind;
    fn dim(&self) -> usize;
}

impl BundleTarget for BooleanPairInstance {
    const KIND: BundleKind = BundleKind::Ov;
    fn dim(&self) -> usize {
        self.d
    }
}

impl BundleTarget for TripleInstance {
    const KIND: BundleKind = BundleKind::ThreeOv;
    fn dim(&self) -> usize {
        self.d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BundleKind {
    Ov,
    ThreeOv,
}

impl BundleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BundleKind::Ov => "ov",
            BundleKind::ThreeOv => "3ov",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleItem<T> {
    /// Index of the Merlin string (or subset) that produced this item.
    pub merlin: u64,
    pub instance: T,
}

/// Reduced instances with OR semantics: yes iff some item is yes.
/// An empty bundle is a no-bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrBundle<T> {
    pub provenance: String,
    pub dim: usize,
    pub items: Vec<BundleItem<T>>,
}

pub type OvBundle = OrBundle<BooleanPairInstance>;
pub type ThreeOvBundle = OrBundle<TripleInstance>;

impl<T: BundleTarget> OrBundle<T> {
    pub fn new(provenance: impl Into<String>, dim: usize) -> Self {
        OrBundle { provenance: provenance.into(), dim, items: Vec::new() }
    }

    pub fn kind(&self) -> BundleKind {
        T::KIND
    }

    pub fn push(&mut self, merlin: u64, instance: T) {
        debug_assert_eq!(instance.dim(), self.dim);
        self.items.push(BundleItem { merlin, instance });
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// OR over items under `decide`; stops at the first yes.
    pub fn decide_with(&self, mut decide: impl FnMut(&T) -> bool) -> bool {
        self.items.iter().any(|it| decide(&it.instance))
    }

    /// Sorts items by Merlin index.
    pub fn canonicalize(&mut self) {
        self.items.sort_by_key(|it| it.merlin);
    }
}

/// Problem tags used by the generator, the text format and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Ov,
    MinIp,
    MaxIp,
    ExactIp,
    GapMin,
    GapMax,
    Bcp,
    Fp,
    Jaccard,
    Hopcroft,
    ThreeOv,
    ThreeSum,
    MaxSat,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 13] = [
        ProblemKind::Ov,
        ProblemKind::MinIp,
        ProblemKind::MaxIp,
        ProblemKind::ExactIp,
        ProblemKind::GapMin,
        ProblemKind::GapMax,
        ProblemKind::Bcp,
        ProblemKind::Fp,
        ProblemKind::Jaccard,
        ProblemKind::Hopcroft,
        ProblemKind::ThreeOv,
        ProblemKind::ThreeSum,
        ProblemKind::MaxSat,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Ov => "ov",
            ProblemKind::MinIp => "minip",
            ProblemKind::MaxIp => "maxip",
            ProblemKind::ExactIp => "exactip",
            ProblemKind::GapMin => "gap-min",
            ProblemKind::GapMax => "gap-max",
            ProblemKind::Bcp => "bcp",
            ProblemKind::Fp => "fp",
            ProblemKind::Jaccard => "jaccard",
            ProblemKind::Hopcroft => "hopcroft",
            ProblemKind::ThreeOv => "3ov",
            ProblemKind::ThreeSum => "3sum",
            ProblemKind::MaxSat => "maxsat",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown problem kind {s:?}"))
    }
}

/// Any instance the library can generate, serialize or solve.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Ov(BooleanPairInstance),
    MinIp(BooleanPairInstance),
    MaxIp(BooleanPairInstance),
    ExactIp(ExactIpInstance),
    Gap(GapInstance),
    Bcp(RealPairInstance<f64>),
    Fp(RealPairInstance<f64>),
    Jaccard(SetFamilyInstance),
    Hopcroft(IntegerPairInstance),
    ThreeOv(TripleInstance),
    ThreeSum(ThreeSumInstance),
    MaxSat(CnfInstance),
}

impl Instance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Instance::Ov(_) => ProblemKind::Ov,
            Instance::MinIp(_) => ProblemKind::MinIp,
            Instance::MaxIp(_) => ProblemKind::MaxIp,
            Instance::ExactIp(_) => ProblemKind::ExactIp,
            Instance::Gap(g) => match g.side {
                GapSide::Min => ProblemKind::GapMin,
                GapSide::Max => ProblemKind::GapMax,
            },
            Instance::Bcp(_) => ProblemKind::Bcp,
            Instance::Fp(_) => ProblemKind::Fp,
            Instance::Jaccard(_) => ProblemKind::Jaccard,
            Instance::Hopcroft(_) => ProblemKind::Hopcroft,
            Instance::ThreeOv(_) => ProblemKind::ThreeOv,
            Instance::ThreeSum(_) => ProblemKind::ThreeSum,
            Instance::MaxSat(_) => ProblemKind::MaxSat,
        }
    }

    /// The Boolean pair carried by OV-family instances.
    pub fn boolean_pair(&self) -> Option<&BooleanPairInstance> {
        match self {
            Instance::Ov(b) | Instance::MinIp(b) | Instance::MaxIp(b) => Some(b),
            Instance::ExactIp(e) => Some(&e.base),
            Instance::Gap(g) => Some(&g.base),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Instance::Ov(b) | Instance::MinIp(b) | Instance::MaxIp(b) => b.validate(),
            Instance::ExactIp(e) => {
                e.base.validate()?;
                if e.m > e.base.d {
                    return Err(invalid(format!("target m = {} exceeds d = {}", e.m, e.base.d)));
                }
                Ok(())
            }
            Instance::Gap(g) => {
                g.base.validate()?;
                if g.tau > g.base.d {
                    return Err(invalid(format!("tau = {} exceeds d = {}", g.tau, g.base.d)));
                }
                Ok(())
            }
            Instance::Bcp(r) | Instance::Fp(r) => r.validate(),
            Instance::Jaccard(s) => s.validate(),
            Instance::Hopcroft(h) => h.validate(),
            Instance::ThreeOv(t) => t.validate(),
            Instance::ThreeSum(t) => t.validate(),
            Instance::MaxSat(c) => c.validate(),
        }
    }
}
