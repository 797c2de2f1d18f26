//! Finite algebras given by operation tables over the universe `0..n`.
//!
//! Every algebra carries a designated element `one` which plays the role of the
//! constant term 1. Tables are stored row-major with the last argument varying
//! fastest, so the entry for `f(a_1, ..., a_r)` sits at
//! `a_1 * n^(r-1) + ... + a_r`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::Congruence;

/// Largest universe we accept. Elements of direct powers are stored as `u16`.
pub const MAX_SIZE: usize = u16::MAX as usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error(
        "range: operation `{op}` has entry {value} at position {position}, universe size is {size}"
    )]
    Range {
        op: String,
        position: usize,
        value: usize,
        size: usize,
    },
    #[error("shape: operation `{op}` of arity {arity} has {found} entries, expected {expected}")]
    Shape {
        op: String,
        arity: usize,
        found: usize,
        expected: usize,
    },
    #[error("no-unit: {0}")]
    NoUnit(String),
    #[error("duplicate-op: operation name `{0}` is used twice")]
    DuplicateOp(String),
    #[error("size: universe size must be between 1 and {MAX_SIZE}, got {0}")]
    Size(usize),
    #[error("not-a-congruence: partition is not compatible with operation `{0}`")]
    NotACongruence(String),
    #[error("parse: {0}")]
    Parse(String),
}

impl AlgebraError {
    /// Short diagnostic code, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            AlgebraError::Range { .. } => "range",
            AlgebraError::Shape { .. } => "shape",
            AlgebraError::NoUnit(_) => "no-unit",
            AlgebraError::DuplicateOp(_) => "duplicate-op",
            AlgebraError::Size(_) => "size",
            AlgebraError::NotACongruence(_) => "not-a-congruence",
            AlgebraError::Parse(_) => "parse",
        }
    }
}

/// Closure generation stopped because the cap was reached: either more than
/// `cap` elements, or more than `cap * WORK_PER_CAP` operation applications.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Serialize)]
#[error("cap-exceeded: closure passed the cap of {cap} ({count} elements generated)")]
pub struct CapExceeded {
    pub cap: usize,
    pub count: usize,
}

/// Operation applications allowed per unit of cap. Without this a closure of
/// a binary operation can spend about `cap²` steps rediscovering known members.
pub const WORK_PER_CAP: usize = 256;

/// Signature of an algebra: operation symbols with their arities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub operations: Vec<(String, usize)>,
}

impl Signature {
    pub fn validate(&self) -> Result<(), AlgebraError> {
        let mut seen = HashSet::new();
        for (name, _) in &self.operations {
            if !seen.insert(name.as_str()) {
                return Err(AlgebraError::DuplicateOp(name.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

/// A validated finite algebra. Fields are private so every value in
/// circulation satisfies the table invariants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    one: usize,
    ops: Vec<Operation>,
}

/// Wire format of an algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawAlgebra {
    #[serde(default)]
    pub name: String,
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub one: Option<usize>,
    #[serde(default)]
    pub operations: Vec<RawOperation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawOperation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

/// Validate a parsed description and build the algebra.
pub fn validate_algebra(raw: &RawAlgebra) -> Result<FiniteAlgebra, AlgebraError> {
    let n = raw.size;
    if n == 0 || n > MAX_SIZE {
        return Err(AlgebraError::Size(n));
    }
    let signature = Signature {
        operations: raw
            .operations
            .iter()
            .map(|op| (op.name.clone(), op.arity))
            .collect(),
    };
    signature.validate()?;

    let mut ops = Vec::with_capacity(raw.operations.len());
    for op in &raw.operations {
        let expected = checked_pow(n, op.arity).ok_or_else(|| AlgebraError::Shape {
            op: op.name.clone(),
            arity: op.arity,
            found: op.table.len(),
            expected: usize::MAX,
        })?;
        if op.table.len() != expected {
            return Err(AlgebraError::Shape {
                op: op.name.clone(),
                arity: op.arity,
                found: op.table.len(),
                expected,
            });
        }
        if let Some((position, &value)) = op.table.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(AlgebraError::Range {
                op: op.name.clone(),
                position,
                value,
                size: n,
            });
        }
        ops.push(Operation {
            name: op.name.clone(),
            arity: op.arity,
            table: op.table.clone(),
        });
    }

    let nullary_one = ops
        .iter()
        .find(|op| op.arity == 0 && op.name == "1")
        .map(|op| op.table[0]);
    let one = match (raw.one, nullary_one) {
        (Some(i), _) if i >= n => {
            return Err(AlgebraError::NoUnit(format!(
                "designated element {i} is outside the universe of size {n}"
            )))
        }
        (Some(i), Some(j)) if i != j => {
            return Err(AlgebraError::NoUnit(format!(
                "field `one` = {i} disagrees with nullary operation `1` = {j}"
            )))
        }
        (Some(i), _) => i,
        (None, Some(j)) => j,
        (None, None) => {
            return Err(AlgebraError::NoUnit(
                "neither a `one` field nor a nullary operation named `1` is present".into(),
            ))
        }
    };

    Ok(FiniteAlgebra {
        name: raw.name.clone(),
        size: n,
        one,
        ops,
    })
}

/// Parse the JSON wire format and validate it.
pub fn parse_algebra_json(text: &str) -> Result<FiniteAlgebra, AlgebraError> {
    let raw: RawAlgebra =
        serde_json::from_str(text).map_err(|e| AlgebraError::Parse(e.to_string()))?;
    validate_algebra(&raw)
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

impl FiniteAlgebra {
    /// Build directly from tables; the same checks as [`validate_algebra`] apply.
    pub fn new(
        name: impl Into<String>,
        size: usize,
        one: usize,
        ops: Vec<(&str, usize, Vec<usize>)>,
    ) -> Result<Self, AlgebraError> {
        validate_algebra(&RawAlgebra {
            name: name.into(),
            size,
            one: Some(one),
            operations: ops
                .into_iter()
                .map(|(name, arity, table)| RawOperation {
                    name: name.to_string(),
                    arity,
                    table,
                })
                .collect(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn operations(&self) -> &[Operation] {
        &self.ops
    }

    pub fn signature(&self) -> Signature {
        Signature {
            operations: self.ops.iter().map(|o| (o.name.clone(), o.arity)).collect(),
        }
    }

    pub fn to_raw(&self) -> RawAlgebra {
        RawAlgebra {
            name: self.name.clone(),
            size: self.size,
            one: Some(self.one),
            operations: self
                .ops
                .iter()
                .map(|o| RawOperation {
                    name: o.name.clone(),
                    arity: o.arity,
                    table: o.table.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("algebra serializes")
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        let op = &self.ops[op];
        debug_assert_eq!(args.len(), op.arity);
        let mut idx = 0;
        for &a in args {
            idx = idx * self.size + a;
        }
        op.table[idx]
    }

    /// True iff the partition is compatible with every operation.
    ///
    /// Checking single-position substitutions of each element against its
    /// block representative is enough: any pair of related tuples is joined by
    /// a chain of such substitutions.
    pub fn is_compatible(&self, theta: &Congruence) -> bool {
        self.incompatible_op(theta).is_none()
    }

    fn incompatible_op(&self, theta: &Congruence) -> Option<usize> {
        let n = self.size;
        let mut args = Vec::new();
        for (oi, op) in self.ops.iter().enumerate() {
            if op.arity == 0 {
                continue;
            }
            for x in 0..n {
                let r = theta.rep(x);
                if r == x {
                    continue;
                }
                for pos in 0..op.arity {
                    let others = op.arity - 1;
                    let count = n.pow(others as u32);
                    for code in 0..count {
                        fill_args(&mut args, op.arity, pos, code, n);
                        args[pos] = x;
                        let u = self.apply(oi, &args);
                        args[pos] = r;
                        let v = self.apply(oi, &args);
                        if !theta.related(u, v) {
                            return Some(oi);
                        }
                    }
                }
            }
        }
        None
    }

    /// Quotient by `theta`. Blocks are numbered by increasing least element;
    /// the returned vector maps each element to its block.
    pub fn quotient(
        &self,
        theta: &Congruence,
    ) -> Result<(FiniteAlgebra, Vec<usize>), AlgebraError> {
        assert_eq!(
            theta.size(),
            self.size,
            "partition over a different universe"
        );
        if let Some(oi) = self.incompatible_op(theta) {
            return Err(AlgebraError::NotACongruence(self.ops[oi].name.clone()));
        }
        let blocks = theta.blocks();
        let mut block_of = vec![0; self.size];
        for (bi, block) in blocks.iter().enumerate() {
            for &x in block {
                block_of[x] = bi;
            }
        }
        let m = blocks.len();
        let mut ops = Vec::with_capacity(self.ops.len());
        let mut args = Vec::new();
        for (oi, op) in self.ops.iter().enumerate() {
            let count = m.pow(op.arity as u32);
            let mut table = Vec::with_capacity(count);
            for code in 0..count {
                decode(&mut args, op.arity, code, m);
                for a in args.iter_mut() {
                    *a = blocks[*a][0];
                }
                table.push(block_of[self.apply(oi, &args)]);
            }
            ops.push(Operation {
                name: op.name.clone(),
                arity: op.arity,
                table,
            });
        }
        let quotient = FiniteAlgebra {
            name: format!("{}/{}", self.name, theta),
            size: m,
            one: block_of[self.one],
            ops,
        };
        Ok((quotient, block_of))
    }

    /// Image of the algebra under a permutation of the universe.
    pub fn permuted(&self, perm: &[usize]) -> FiniteAlgebra {
        let n = self.size;
        let mut inv = vec![0; n];
        for (x, &px) in perm.iter().enumerate() {
            inv[px] = x;
        }
        let mut args = Vec::new();
        let ops = self
            .ops
            .iter()
            .enumerate()
            .map(|(oi, op)| {
                let count = n.pow(op.arity as u32);
                let table = (0..count)
                    .map(|code| {
                        decode(&mut args, op.arity, code, n);
                        for a in args.iter_mut() {
                            *a = inv[*a];
                        }
                        perm[self.apply(oi, &args)]
                    })
                    .collect();
                Operation {
                    name: op.name.clone(),
                    arity: op.arity,
                    table,
                }
            })
            .collect();
        FiniteAlgebra {
            name: self.name.clone(),
            size: n,
            one: perm[self.one],
            ops,
        }
    }
}

/// Decode `code` into `arity` base-`n` digits, most significant first.
pub(crate) fn decode(args: &mut Vec<usize>, arity: usize, mut code: usize, n: usize) {
    args.clear();
    args.resize(arity, 0);
    for slot in args.iter_mut().rev() {
        *slot = code % n;
        code /= n;
    }
}

/// Like [`decode`] but skips position `pos`, which is left for the caller.
pub(crate) fn fill_args(
    args: &mut Vec<usize>,
    arity: usize,
    pos: usize,
    mut code: usize,
    n: usize,
) {
    args.clear();
    args.resize(arity, 0);
    for i in (0..arity).rev() {
        if i == pos {
            continue;
        }
        args[i] = code % n;
        code /= n;
    }
}

/// An element of a direct power `A^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ElementVector(pub Vec<u16>);

impl ElementVector {
    pub fn constant(len: usize, value: usize) -> Self {
        ElementVector(vec![value as u16; len])
    }

    pub fn get(&self, i: usize) -> usize {
        self.0[i] as usize
    }
}

impl Deref for ElementVector {
    type Target = [u16];
    fn deref(&self) -> &[u16] {
        &self.0
    }
}

impl From<Vec<usize>> for ElementVector {
    fn from(v: Vec<usize>) -> Self {
        ElementVector(v.into_iter().map(|x| x as u16).collect())
    }
}

/// How a member of a generated subuniverse was first obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Generator(usize),
    One,
    Apply { op: usize, args: Vec<usize> },
}

/// A term over variables `x0, x1, ...` in the signature of some algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    One,
    App(usize, Vec<Term>),
}

impl Term {
    pub fn eval(&self, alg: &FiniteAlgebra, assignment: &[usize]) -> usize {
        match self {
            Term::Var(i) => assignment[*i],
            Term::One => alg.one(),
            Term::App(op, args) => {
                let vals: Vec<usize> = args.iter().map(|t| t.eval(alg, assignment)).collect();
                alg.apply(*op, &vals)
            }
        }
    }

    /// Human-readable rendering with the algebra's operation names.
    pub fn render(&self, alg: &FiniteAlgebra, var_names: &[&str]) -> String {
        match self {
            Term::Var(i) => var_names
                .get(*i)
                .map(|s| s.to_string())
                .unwrap_or_else(|| format!("x{i}")),
            Term::One => "1".to_string(),
            Term::App(op, args) => {
                let name = &alg.operations()[*op].name;
                let parts: Vec<String> = args.iter().map(|t| t.render(alg, var_names)).collect();
                if parts.len() == 2 && !name.chars().any(|c| c.is_alphanumeric()) {
                    format!("({} {} {})", parts[0], name, parts[1])
                } else if parts.is_empty() {
                    name.clone()
                } else {
                    format!("{}({})", name, parts.join(", "))
                }
            }
        }
    }
}

/// A subuniverse of `A^k` in generation order.
#[derive(Debug, Clone)]
pub struct Subuniverse {
    pub power: usize,
    pub vectors: Vec<ElementVector>,
    pub derivations: Vec<Derivation>,
    /// Number of members in each breadth-first level.
    pub levels: Vec<usize>,
    index: HashMap<ElementVector, usize>,
}

impl Subuniverse {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: &ElementVector) -> bool {
        self.index.contains_key(v)
    }

    pub fn position(&self, v: &ElementVector) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Rebuild the term that produced member `i` by following parent pointers.
    pub fn term(&self, i: usize) -> Term {
        match &self.derivations[i] {
            Derivation::Generator(g) => Term::Var(*g),
            Derivation::One => Term::One,
            Derivation::Apply { op, args } => {
                Term::App(*op, args.iter().map(|&a| self.term(a)).collect())
            }
        }
    }
}

/// Result of a closure run that may stop early on a target.
#[derive(Debug, Clone)]
pub struct Closure {
    pub universe: Subuniverse,
    /// Position of the first member accepted by the stop predicate.
    pub found: Option<usize>,
}

/// Least subuniverse of `A^power` containing `generators` and the constants.
pub fn generate_subuniverse(
    alg: &FiniteAlgebra,
    power: usize,
    generators: &[ElementVector],
    cap: usize,
) -> Result<Subuniverse, CapExceeded> {
    generate_until(alg, power, generators, cap, |_| false).map(|c| c.universe)
}

/// Breadth-first closure that stops after the first level containing a
/// member accepted by `stop`. Levels are sorted lexicographically, so the
/// reported member is deterministic.
pub fn generate_until(
    alg: &FiniteAlgebra,
    power: usize,
    generators: &[ElementVector],
    cap: usize,
    stop: impl Fn(&ElementVector) -> bool,
) -> Result<Closure, CapExceeded> {
    for g in generators {
        assert_eq!(g.len(), power, "generator of the wrong length");
    }
    let mut level: Vec<(ElementVector, Derivation)> = Vec::new();
    let mut seen: HashMap<ElementVector, ()> = HashMap::new();
    for (i, g) in generators.iter().enumerate() {
        if seen.insert(g.clone(), ()).is_none() {
            level.push((g.clone(), Derivation::Generator(i)));
        }
    }
    let one = ElementVector::constant(power, alg.one());
    if seen.insert(one.clone(), ()).is_none() {
        level.push((one, Derivation::One));
    }
    for (oi, op) in alg.operations().iter().enumerate() {
        if op.arity == 0 {
            let v = ElementVector::constant(power, op.table[0]);
            if seen.insert(v.clone(), ()).is_none() {
                level.push((
                    v,
                    Derivation::Apply {
                        op: oi,
                        args: vec![],
                    },
                ));
            }
        }
    }
    level.sort_by(|a, b| a.0.cmp(&b.0));

    let budget = cap.saturating_mul(WORK_PER_CAP);
    let mut work = 0usize;
    let mut universe = Subuniverse {
        power,
        vectors: Vec::new(),
        derivations: Vec::new(),
        levels: Vec::new(),
        index: HashMap::new(),
    };
    if level.len() > cap {
        return Err(CapExceeded {
            cap,
            count: level.len(),
        });
    }

    loop {
        let start = universe.vectors.len();
        universe.levels.push(level.len());
        for (v, d) in level.drain(..) {
            universe.index.insert(v.clone(), universe.vectors.len());
            universe.vectors.push(v);
            universe.derivations.push(d);
        }
        if let Some(found) = (start..universe.vectors.len()).find(|&i| stop(&universe.vectors[i])) {
            return Ok(Closure {
                universe,
                found: Some(found),
            });
        }
        let end = universe.vectors.len();
        if start == end {
            universe.levels.pop();
            break;
        }

        let mut fresh: HashMap<ElementVector, Derivation> = HashMap::new();
        for (oi, op) in alg.operations().iter().enumerate() {
            if op.arity == 0 {
                continue;
            }
            let r = op.arity;
            // Tuples over 0..end with at least one coordinate in the frontier:
            // the first frontier coordinate sits at `lead`, earlier coordinates
            // are old, later ones unrestricted.
            for lead in 0..r {
                let mut idx = vec![0usize; r];
                let ranges: Vec<(usize, usize)> = (0..r)
                    .map(|p| match p.cmp(&lead) {
                        std::cmp::Ordering::Less => (0, start),
                        std::cmp::Ordering::Equal => (start, end),
                        std::cmp::Ordering::Greater => (0, end),
                    })
                    .collect();
                if ranges.iter().any(|&(lo, hi)| lo >= hi) {
                    continue;
                }
                for (p, &(lo, _)) in ranges.iter().enumerate() {
                    idx[p] = lo;
                }
                let mut args = vec![0usize; r];
                loop {
                    work += 1;
                    if work > budget {
                        return Err(CapExceeded {
                            cap,
                            count: end + fresh.len(),
                        });
                    }
                    let mut out = Vec::with_capacity(power);
                    for c in 0..power {
                        for (p, &i) in idx.iter().enumerate() {
                            args[p] = universe.vectors[i].get(c);
                        }
                        out.push(alg.apply(oi, &args) as u16);
                    }
                    let out = ElementVector(out);
                    if !universe.index.contains_key(&out) && !fresh.contains_key(&out) {
                        fresh.insert(
                            out,
                            Derivation::Apply {
                                op: oi,
                                args: idx.clone(),
                            },
                        );
                        if end + fresh.len() > cap {
                            return Err(CapExceeded {
                                cap,
                                count: end + fresh.len(),
                            });
                        }
                    }
                    if !advance(&mut idx, &ranges) {
                        break;
                    }
                }
            }
        }
        level = fresh.into_iter().collect();
        level.sort_by(|a, b| a.0.cmp(&b.0));
    }
    Ok(Closure {
        universe,
        found: None,
    })
}

/// Largest `n^power` handled by [`generate_dense`].
pub const DENSE_LIMIT: usize = 1 << 26;

/// A subuniverse of `A^power` whose members are encoded as base-`n` integers,
/// most significant coordinate first, so numeric order is lexicographic order.
#[derive(Debug, Clone)]
pub struct DenseSubuniverse {
    pub size: usize,
    pub power: usize,
    pub codes: Vec<u32>,
}

impl DenseSubuniverse {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn vector(&self, i: usize) -> ElementVector {
        let mut args = Vec::new();
        decode(&mut args, self.power, self.codes[i] as usize, self.size);
        ElementVector::from(args)
    }

    pub fn coords(&self, i: usize, out: &mut Vec<usize>) {
        decode(out, self.power, self.codes[i] as usize, self.size);
    }
}

/// Same closure as [`generate_subuniverse`] without derivations, using a
/// bitset over `A^power`. Requires `n^power <= DENSE_LIMIT`.
pub fn generate_dense(
    alg: &FiniteAlgebra,
    power: usize,
    generators: &[ElementVector],
    cap: usize,
) -> Result<DenseSubuniverse, CapExceeded> {
    let n = alg.size();
    let total = checked_pow(n, power).expect("power overflows");
    assert!(
        total <= DENSE_LIMIT,
        "direct power too large for a dense closure"
    );
    let encode = |v: &[usize]| v.iter().fold(0usize, |acc, &x| acc * n + x);
    let mut seen = vec![false; total];
    let mut level: Vec<u32> = Vec::new();
    let push = |code: usize, seen: &mut Vec<bool>, level: &mut Vec<u32>| {
        if !seen[code] {
            seen[code] = true;
            level.push(code as u32);
        }
    };
    for g in generators {
        assert_eq!(g.len(), power, "generator of the wrong length");
        let v: Vec<usize> = g.iter().map(|&x| x as usize).collect();
        push(encode(&v), &mut seen, &mut level);
    }
    push(encode(&vec![alg.one(); power]), &mut seen, &mut level);
    for op in alg.operations() {
        if op.arity == 0 {
            push(encode(&vec![op.table[0]; power]), &mut seen, &mut level);
        }
    }
    level.sort_unstable();

    let budget = cap.saturating_mul(WORK_PER_CAP);
    let mut work = 0usize;
    let mut codes: Vec<u32> = Vec::new();
    let mut digits: Vec<usize> = Vec::new();
    let mut scratch = Vec::new();
    while !level.is_empty() {
        if codes.len() + level.len() > cap {
            return Err(CapExceeded {
                cap,
                count: codes.len() + level.len(),
            });
        }
        let start = codes.len();
        for &c in &level {
            codes.push(c);
            decode(&mut scratch, power, c as usize, n);
            digits.extend_from_slice(&scratch);
        }
        let end = codes.len();
        level.clear();
        for (oi, op) in alg.operations().iter().enumerate() {
            if op.arity == 0 {
                continue;
            }
            let r = op.arity;
            for lead in 0..r {
                let ranges: Vec<(usize, usize)> = (0..r)
                    .map(|p| match p.cmp(&lead) {
                        std::cmp::Ordering::Less => (0, start),
                        std::cmp::Ordering::Equal => (start, end),
                        std::cmp::Ordering::Greater => (0, end),
                    })
                    .collect();
                if ranges.iter().any(|&(lo, hi)| lo >= hi) {
                    continue;
                }
                let mut idx: Vec<usize> = ranges.iter().map(|&(lo, _)| lo).collect();
                let mut args = vec![0usize; r];
                loop {
                    work += 1;
                    if work > budget {
                        return Err(CapExceeded {
                            cap,
                            count: end + level.len(),
                        });
                    }
                    let mut code = 0usize;
                    for c in 0..power {
                        for (p, &i) in idx.iter().enumerate() {
                            args[p] = digits[i * power + c];
                        }
                        code = code * n + alg.apply(oi, &args);
                    }
                    if !seen[code] {
                        seen[code] = true;
                        level.push(code as u32);
                        if end + level.len() > cap {
                            return Err(CapExceeded {
                                cap,
                                count: end + level.len(),
                            });
                        }
                    }
                    if !advance(&mut idx, &ranges) {
                        break;
                    }
                }
            }
        }
        level.sort_unstable();
    }
    Ok(DenseSubuniverse {
        size: n,
        power,
        codes,
    })
}

/// Odometer step over half-open ranges, last coordinate fastest.
/// Returns false once every combination has been visited.
fn advance(idx: &mut [usize], ranges: &[(usize, usize)]) -> bool {
    for p in (0..idx.len()).rev() {
        idx[p] += 1;
        if idx[p] < ranges[p].1 {
            return true;
        }
        idx[p] = ranges[p].0;
    }
    false
}

/// The projection vectors of `A^(A^k)`: coordinate `t` of projection `i` is the
/// `i`-th entry of the tuple encoded by `t`.
pub fn projections(n: usize, k: usize) -> Vec<ElementVector> {
    let len = n.pow(k as u32);
    let mut args = Vec::new();
    let mut gens = vec![Vec::with_capacity(len); k];
    for t in 0..len {
        decode(&mut args, k, t, n);
        for (i, g) in gens.iter_mut().enumerate() {
            g.push(args[i] as u16);
        }
    }
    gens.into_iter().map(ElementVector).collect()
}

/// The `k`-generated free algebra of the variety generated by `A`, realised as
/// the clone of `k`-ary term operations inside `A^(A^k)`.
pub fn free_algebra(alg: &FiniteAlgebra, k: usize, cap: usize) -> Result<Subuniverse, CapExceeded> {
    let gens = projections(alg.size(), k);
    generate_subuniverse(alg, alg.size().pow(k as u32), &gens, cap)
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (size {}, one = {})", self.name, self.size, self.one)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn hilb3_validates() {
        let a = fixtures::hilb3();
        assert_eq!(a.size(), 3);
        assert_eq!(a.one(), 0);
        // x -> y = 1 when x = y, y otherwise
        for x in 0..3 {
            for y in 0..3 {
                let expect = if x == y { 0 } else { y };
                assert_eq!(a.apply(0, &[x, y]), expect);
            }
        }
    }

    #[test]
    fn trivial_algebra_validates() {
        let raw = RawAlgebra {
            name: "triv".into(),
            size: 1,
            one: Some(0),
            operations: vec![],
        };
        assert!(validate_algebra(&raw).is_ok());
    }

    #[test]
    fn range_error() {
        let mut raw = fixtures::hilb3().to_raw();
        raw.operations[0].table[4] = 7;
        let err = validate_algebra(&raw).unwrap_err();
        assert_eq!(err.code(), "range");
    }

    #[test]
    fn shape_error() {
        let mut raw = fixtures::hilb3().to_raw();
        raw.operations[0].table.pop();
        assert_eq!(validate_algebra(&raw).unwrap_err().code(), "shape");
    }

    #[test]
    fn missing_unit() {
        let mut raw = fixtures::hilb3().to_raw();
        raw.one = None;
        assert_eq!(validate_algebra(&raw).unwrap_err().code(), "no-unit");
        raw.one = Some(3);
        assert_eq!(validate_algebra(&raw).unwrap_err().code(), "no-unit");
    }

    #[test]
    fn unit_from_nullary_operation() {
        let raw = RawAlgebra {
            name: "c".into(),
            size: 2,
            one: None,
            operations: vec![RawOperation {
                name: "1".into(),
                arity: 0,
                table: vec![1],
            }],
        };
        assert_eq!(validate_algebra(&raw).unwrap().one(), 1);
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut raw = fixtures::hilb3().to_raw();
        raw.operations.push(raw.operations[0].clone());
        assert_eq!(validate_algebra(&raw).unwrap_err().code(), "duplicate-op");
    }

    #[test]
    fn quotient_by_identity_and_total() {
        let a = fixtures::hilb3();
        let (q, map) = a.quotient(&Congruence::identity(3)).unwrap();
        assert_eq!(q.operations()[0].table, a.operations()[0].table);
        assert_eq!(map, vec![0, 1, 2]);
        let (q, _) = a.quotient(&Congruence::total(3)).unwrap();
        assert_eq!(q.size(), 1);
    }

    #[test]
    fn quotient_of_hilb3_by_alpha() {
        let a = fixtures::hilb3();
        // blocks {1,a} {b}
        let alpha = Congruence::from_blocks(3, &[vec![0, 1], vec![2]]);
        let (q, map) = a.quotient(&alpha).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(map, vec![0, 0, 1]);
        assert_eq!(q.one(), 0);
        // the two-element implication algebra
        assert_eq!(q.operations()[0].table, vec![0, 1, 0, 0]);
    }

    #[test]
    fn quotient_rejects_non_congruence() {
        let a = fixtures::hilb3();
        let bad = Congruence::from_blocks(3, &[vec![0], vec![1, 2]]);
        assert_eq!(a.quotient(&bad).unwrap_err().code(), "not-a-congruence");
    }

    #[test]
    fn empty_generators_give_constants() {
        let a = fixtures::bg4();
        let s = generate_subuniverse(&a, 2, &[], 100).unwrap();
        assert_eq!(s.vectors, vec![ElementVector::constant(2, 0)]);
    }

    #[test]
    fn cap_is_enforced() {
        let a = fixtures::bg4();
        let gens = projections(4, 1);
        let err = generate_subuniverse(&a, 4, &gens, 1).unwrap_err();
        assert!(err.count > 1);
    }

    #[test]
    fn free_boolean_group_on_three_generators() {
        let a = fixtures::bg4();
        let f = free_algebra(&a, 3, 1000).unwrap();
        assert_eq!(f.len(), 8);
        // x·y·z is present
        let xyz: Vec<usize> = (0..64)
            .map(|t| {
                let (x, y, z) = (t / 16, (t / 4) % 4, t % 4);
                a.apply(0, &[a.apply(0, &[x, y]), z])
            })
            .collect();
        assert!(f.contains(&ElementVector::from(xyz)));
    }

    #[test]
    fn free_algebra_of_trivial() {
        let a = fixtures::triv1();
        for k in 1..4 {
            assert_eq!(free_algebra(&a, k, 10).unwrap().len(), 1);
        }
    }

    #[test]
    fn terms_reproduce_vectors() {
        for a in [fixtures::hilb3(), fixtures::lat2(), fixtures::bg4()] {
            let f = free_algebra(&a, 2, 100_000).unwrap();
            let n = a.size();
            for i in 0..f.len() {
                let t = f.term(i);
                for x in 0..n {
                    for y in 0..n {
                        assert_eq!(t.eval(&a, &[x, y]), f.vectors[i].get(x * n + y));
                    }
                }
            }
        }
    }

    #[test]
    fn closure_is_idempotent() {
        let a = fixtures::hilb3();
        let f = free_algebra(&a, 2, 100_000).unwrap();
        let again = generate_subuniverse(&a, 9, &f.vectors, 100_000).unwrap();
        let mut x = f.vectors.clone();
        let mut y = again.vectors.clone();
        x.sort();
        y.sort();
        assert_eq!(x, y);
    }

    #[test]
    fn dense_closure_agrees_with_hashed() {
        let cases = [
            (fixtures::hilb3(), 2),
            (fixtures::lat2(), 3),
            (fixtures::z4(), 1),
            (fixtures::bg4(), 1),
        ];
        for (a, k) in cases {
            let gens = projections(a.size(), k);
            let hashed = generate_subuniverse(&a, a.size().pow(k as u32), &gens, 100_000).unwrap();
            let dense = generate_dense(&a, a.size().pow(k as u32), &gens, 100_000).unwrap();
            assert_eq!(hashed.len(), dense.len());
            // both enumerate level by level in lexicographic order
            let from_dense: Vec<ElementVector> =
                (0..dense.len()).map(|i| dense.vector(i)).collect();
            assert_eq!(hashed.vectors, from_dense);
        }
        let gens = projections(4, 1);
        assert!(generate_dense(&fixtures::bg4(), 4, &gens, 1).is_err());
    }

    #[test]
    fn permutation_round_trip() {
        let a = fixtures::hilb3();
        let b = a.permuted(&[0, 2, 1]);
        // the definition of the implication is symmetric in a and b
        assert_eq!(a.operations(), b.operations());
        let z = fixtures::z4().permuted(&[0, 3, 2, 1]);
        assert_eq!(z.operations(), fixtures::z4().operations());
    }
}
