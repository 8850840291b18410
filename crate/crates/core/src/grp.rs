//! Discrete groups with canonical normal forms.
//!
//! Every element is stored as a small integer vector whose meaning depends on
//! the family:
//!
//! | family            | representation                                  |
//! |-------------------|-------------------------------------------------|
//! | `Cyclic(n)`       | `[k]`, `0 <= k < n`                             |
//! | `Dihedral(n)`     | `[k, e]` for `r^k s^e`                          |
//! | `FiniteProduct`   | one residue per cyclic factor                   |
//! | `Lattice(d)`      | `d` integers                                    |
//! | `FreeTwo`         | reduced word, `a = 1, a^-1 = -1, b = 2, b^-1 = -2` |
//! | `ModularGroup`    | alternating syllables, `s = 0, t = 1, t^2 = 2`  |
//!
//! Equality of elements is equality of these vectors.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A group element in canonical normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(Vec<i64>);

impl GroupElement {
    pub fn from_raw(repr: Vec<i64>) -> Self {
        GroupElement(repr)
    }

    pub fn raw(&self) -> &[i64] {
        &self.0
    }
}

const SYL_S: i64 = 0;
const SYL_T: i64 = 1;
const SYL_T2: i64 = 2;

/// The shipped group families.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Group {
    /// ℤ_n with generator `r`.
    Cyclic { n: u32 },
    /// Dihedral group of order 2n, `r^n = s^2 = e`, `s r s = r^-1`.
    Dihedral { n: u32 },
    /// ℤ_{n_1} × … × ℤ_{n_k}.
    FiniteProduct { factors: Vec<u32> },
    /// ℤ^d.
    Lattice { dim: u32 },
    /// The free group on `a`, `b`.
    FreeTwo,
    /// ℤ_2 ∗ ℤ_3 = ⟨s, t | s², t³⟩, isomorphic to PSL(2,ℤ).
    ModularGroup,
}

/// Length functions on the shipped groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthFunction {
    /// Word length with respect to the standard generators of the family.
    Word,
    /// |g|₁ on ℤ^d.
    OneNorm,
    /// |g|₂ on ℤ^d.
    TwoNorm,
    /// |g|₂² on ℤ^d.
    SquaredTwoNorm,
    /// Number of syllables in ℤ₂ ∗ ℤ₃.
    Block,
}

impl Group {
    pub fn cyclic(n: u32) -> Self {
        Group::Cyclic { n }
    }

    pub fn lattice(dim: u32) -> Self {
        Group::Lattice { dim }
    }

    pub fn is_finite(&self) -> bool {
        matches!(
            self,
            Group::Cyclic { .. } | Group::Dihedral { .. } | Group::FiniteProduct { .. }
        )
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            Group::Cyclic { .. } | Group::FiniteProduct { .. } | Group::Lattice { .. } => true,
            Group::Dihedral { n } => *n <= 2,
            Group::FreeTwo | Group::ModularGroup => false,
        }
    }

    /// Order of the group, `None` for infinite families.
    pub fn order(&self) -> Option<usize> {
        match self {
            Group::Cyclic { n } => Some(*n as usize),
            Group::Dihedral { n } => Some(2 * *n as usize),
            Group::FiniteProduct { factors } => {
                Some(factors.iter().map(|&f| f as usize).product())
            }
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Group::Cyclic { n } | Group::Dihedral { n } if *n == 0 => {
                Err(Error::InvalidParameter("group order parameter must be >= 1".into()))
            }
            Group::FiniteProduct { factors } if factors.is_empty() || factors.contains(&0) => {
                Err(Error::InvalidParameter("product factors must be nonempty and >= 1".into()))
            }
            Group::Lattice { dim } if *dim == 0 => {
                Err(Error::InvalidParameter("lattice dimension must be >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            Group::Cyclic { .. } => GroupElement(vec![0]),
            Group::Dihedral { .. } => GroupElement(vec![0, 0]),
            Group::FiniteProduct { factors } => GroupElement(vec![0; factors.len()]),
            Group::Lattice { dim } => GroupElement(vec![0; *dim as usize]),
            Group::FreeTwo | Group::ModularGroup => GroupElement(Vec::new()),
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        *g == self.identity()
    }

    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match self {
            Group::Cyclic { n } => GroupElement(vec![(g.0[0] + h.0[0]).rem_euclid(*n as i64)]),
            Group::Dihedral { n } => {
                let n = *n as i64;
                // r^a s^e · r^b s^f = r^(a ± b) s^(e+f)
                let (a, e) = (g.0[0], g.0[1]);
                let (b, f) = (h.0[0], h.0[1]);
                let k = if e == 0 { a + b } else { a - b };
                GroupElement(vec![k.rem_euclid(n), (e + f).rem_euclid(2)])
            }
            Group::FiniteProduct { factors } => GroupElement(
                factors
                    .iter()
                    .zip(g.0.iter().zip(&h.0))
                    .map(|(&m, (x, y))| (x + y).rem_euclid(m as i64))
                    .collect(),
            ),
            Group::Lattice { .. } => {
                GroupElement(g.0.iter().zip(&h.0).map(|(x, y)| x + y).collect())
            }
            Group::FreeTwo => {
                let mut out = g.0.clone();
                for &x in &h.0 {
                    if out.last() == Some(&-x) {
                        out.pop();
                    } else {
                        out.push(x);
                    }
                }
                GroupElement(out)
            }
            Group::ModularGroup => {
                let mut out = g.0.clone();
                for &x in &h.0 {
                    push_syllable(&mut out, x);
                }
                GroupElement(out)
            }
        }
    }

    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        match self {
            Group::Cyclic { n } => GroupElement(vec![(-g.0[0]).rem_euclid(*n as i64)]),
            Group::Dihedral { n } => {
                if g.0[1] == 0 {
                    GroupElement(vec![(-g.0[0]).rem_euclid(*n as i64), 0])
                } else {
                    // reflections are involutions
                    g.clone()
                }
            }
            Group::FiniteProduct { factors } => GroupElement(
                factors
                    .iter()
                    .zip(&g.0)
                    .map(|(&m, x)| (-x).rem_euclid(m as i64))
                    .collect(),
            ),
            Group::Lattice { .. } => GroupElement(g.0.iter().map(|x| -x).collect()),
            Group::FreeTwo => GroupElement(g.0.iter().rev().map(|x| -x).collect()),
            Group::ModularGroup => GroupElement(
                g.0.iter()
                    .rev()
                    .map(|&x| match x {
                        SYL_T => SYL_T2,
                        SYL_T2 => SYL_T,
                        other => other,
                    })
                    .collect(),
            ),
        }
    }

    /// `g⁻¹ h`.
    pub fn left_div(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.mul(&self.inv(g), h)
    }

    /// Number of generators used by [`Group::generator_word`].
    pub fn generator_count(&self) -> usize {
        match self {
            Group::Cyclic { .. } => 1,
            Group::Dihedral { .. } => 2,
            Group::FiniteProduct { factors } => factors.len(),
            Group::Lattice { dim } => *dim as usize,
            Group::FreeTwo => 2,
            Group::ModularGroup => 2,
        }
    }

    /// Generator elements in the order used by [`Group::generator_word`].
    pub fn generators(&self) -> Vec<GroupElement> {
        match self {
            Group::Cyclic { n } => vec![GroupElement(vec![1 % *n as i64])],
            Group::Dihedral { n } => {
                vec![GroupElement(vec![1 % *n as i64, 0]), GroupElement(vec![0, 1])]
            }
            Group::FiniteProduct { factors } => (0..factors.len())
                .map(|i| {
                    let mut v = vec![0; factors.len()];
                    v[i] = 1 % factors[i] as i64;
                    GroupElement(v)
                })
                .collect(),
            Group::Lattice { dim } => (0..*dim as usize)
                .map(|i| {
                    let mut v = vec![0; *dim as usize];
                    v[i] = 1;
                    GroupElement(v)
                })
                .collect(),
            Group::FreeTwo => vec![GroupElement(vec![1]), GroupElement(vec![2])],
            Group::ModularGroup => vec![GroupElement(vec![SYL_S]), GroupElement(vec![SYL_T])],
        }
    }

    /// The normal form written as a product of generator powers, as
    /// `(generator index, exponent)` pairs, read left to right.
    pub fn generator_word(&self, g: &GroupElement) -> Vec<(usize, i64)> {
        match self {
            Group::Cyclic { .. } => vec![(0, g.0[0])],
            Group::Dihedral { .. } => vec![(0, g.0[0]), (1, g.0[1])],
            Group::FiniteProduct { .. } | Group::Lattice { .. } => {
                g.0.iter().enumerate().map(|(i, &k)| (i, k)).collect()
            }
            Group::FreeTwo => g
                .0
                .iter()
                .map(|&x| ((x.unsigned_abs() - 1) as usize, x.signum()))
                .collect(),
            Group::ModularGroup => g
                .0
                .iter()
                .map(|&x| match x {
                    SYL_S => (0, 1),
                    SYL_T => (1, 1),
                    _ => (1, 2),
                })
                .collect(),
        }
        .into_iter()
        .filter(|&(_, k)| k != 0)
        .collect()
    }

    /// Parse a word over the family's alphabet into normal form.
    ///
    /// Tokens are separated by whitespace or `*`. A token is either a
    /// generator symbol with an optional exponent (`a`, `a^-1`, `a⁻¹`, `A`,
    /// `t²`, `r^3`), the identity `e`, or a tuple `(x, y, …)`. Tuples may be
    /// joined by `+` on abelian families.
    pub fn parse(&self, word: &str) -> Result<GroupElement> {
        let mut acc = self.identity();
        let normalized = word.replace('⁻', "^-").replace('¹', "1").replace('²', "^2");
        for piece in split_tokens(&normalized) {
            let g = self.parse_token(&piece, word)?;
            acc = self.mul(&acc, &g);
        }
        Ok(acc)
    }

    fn parse_token(&self, token: &str, word: &str) -> Result<GroupElement> {
        let unknown = || Error::UnknownGenerator {
            symbol: token.to_string(),
            word: word.to_string(),
        };
        if token == "e" || token == "1" {
            return Ok(self.identity());
        }
        if token.starts_with('(') {
            return self.parse_tuple(token).ok_or_else(unknown);
        }
        let (sym, exp) = match token.split_once('^') {
            Some((s, e)) => (s, e.parse::<i64>().map_err(|_| unknown())?),
            None => (token, 1),
        };
        let (gen, exp) = match (self, sym) {
            (Group::FreeTwo, "a") => (0, exp),
            (Group::FreeTwo, "A") => (0, -exp),
            (Group::FreeTwo, "b") => (1, exp),
            (Group::FreeTwo, "B") => (1, -exp),
            (Group::ModularGroup, "s") => (0, exp),
            (Group::ModularGroup, "t") => (1, exp),
            (Group::Cyclic { .. }, "r") | (Group::Dihedral { .. }, "r") => (0, exp),
            (Group::Dihedral { .. }, "s") => (1, exp),
            (Group::Lattice { dim }, sym) if sym.len() == 1 => {
                let idx = "xyzw".find(sym).ok_or_else(unknown)?;
                if idx >= *dim as usize {
                    return Err(unknown());
                }
                (idx, exp)
            }
            _ => return Err(unknown()),
        };
        Ok(self.generator_power(gen, exp))
    }

    fn parse_tuple(&self, token: &str) -> Option<GroupElement> {
        let inner = token.strip_prefix('(')?.strip_suffix(')')?;
        let vals: Vec<i64> = inner
            .split(',')
            .map(|s| s.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .ok()?;
        match self {
            Group::Lattice { dim } if vals.len() == *dim as usize => Some(GroupElement(vals)),
            Group::Cyclic { n } if vals.len() == 1 => {
                Some(GroupElement(vec![vals[0].rem_euclid(*n as i64)]))
            }
            Group::FiniteProduct { factors } if vals.len() == factors.len() => Some(GroupElement(
                factors
                    .iter()
                    .zip(vals)
                    .map(|(&m, v)| v.rem_euclid(m as i64))
                    .collect(),
            )),
            Group::Dihedral { n } if vals.len() == 2 => Some(GroupElement(vec![
                vals[0].rem_euclid(*n as i64),
                vals[1].rem_euclid(2),
            ])),
            _ => None,
        }
    }

    /// `gen^exp` in normal form.
    pub fn generator_power(&self, gen: usize, exp: i64) -> GroupElement {
        let base = &self.generators()[gen];
        let step = if exp >= 0 { base.clone() } else { self.inv(base) };
        match self {
            Group::Lattice { .. } => {
                GroupElement(base.0.iter().map(|&x| x * exp).collect())
            }
            _ => {
                let reps = match self.order_of_generator(gen) {
                    Some(m) => exp.unsigned_abs() % m,
                    None => exp.unsigned_abs(),
                };
                (0..reps).fold(self.identity(), |acc, _| self.mul(&acc, &step))
            }
        }
    }

    fn order_of_generator(&self, gen: usize) -> Option<u64> {
        match self {
            Group::Cyclic { n } => Some(*n as u64),
            Group::Dihedral { n } => Some(if gen == 0 { *n as u64 } else { 2 }),
            Group::FiniteProduct { factors } => Some(factors[gen] as u64),
            Group::ModularGroup => Some(if gen == 0 { 2 } else { 3 }),
            Group::Lattice { .. } | Group::FreeTwo => None,
        }
    }

    /// Render the normal form; `parse(display(g)) == g`.
    pub fn display(&self, g: &GroupElement) -> String {
        if self.is_identity(g) {
            return "e".to_string();
        }
        match self {
            Group::Cyclic { .. } => power("r", g.0[0]),
            Group::Dihedral { .. } => {
                let mut parts = Vec::new();
                if g.0[0] != 0 {
                    parts.push(power("r", g.0[0]));
                }
                if g.0[1] != 0 {
                    parts.push("s".to_string());
                }
                parts.join(" ")
            }
            Group::FiniteProduct { .. } | Group::Lattice { .. } => format!(
                "({})",
                g.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
            Group::FreeTwo => g
                .0
                .iter()
                .map(|&x| match x {
                    1 => "a",
                    -1 => "a^-1",
                    2 => "b",
                    _ => "b^-1",
                })
                .collect::<Vec<_>>()
                .join(" "),
            Group::ModularGroup => g
                .0
                .iter()
                .map(|&x| match x {
                    SYL_S => "s",
                    SYL_T => "t",
                    _ => "t^2",
                })
                .collect::<Vec<_>>()
                .join(" "),
        }
    }

    pub fn supports_length(&self, l: LengthFunction) -> bool {
        match l {
            LengthFunction::Word => true,
            LengthFunction::OneNorm | LengthFunction::TwoNorm | LengthFunction::SquaredTwoNorm => {
                matches!(self, Group::Lattice { .. })
            }
            LengthFunction::Block => matches!(self, Group::ModularGroup),
        }
    }

    fn check_length(&self, l: LengthFunction) -> Result<()> {
        if self.supports_length(l) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "length function {l:?} is not defined on {self:?}"
            )))
        }
    }

    /// L(g). Panics if `l` is not defined on this family; use
    /// [`Group::try_length`] for a checked variant.
    pub fn length(&self, g: &GroupElement, l: LengthFunction) -> f64 {
        self.try_length(g, l).expect("length function not defined on group")
    }

    pub fn try_length(&self, g: &GroupElement, l: LengthFunction) -> Result<f64> {
        self.check_length(l)?;
        Ok(match (self, l) {
            (Group::Lattice { .. }, LengthFunction::Word | LengthFunction::OneNorm) => {
                g.0.iter().map(|x| x.abs()).sum::<i64>() as f64
            }
            (Group::Lattice { .. }, LengthFunction::TwoNorm) => {
                (g.0.iter().map(|x| x * x).sum::<i64>() as f64).sqrt()
            }
            (Group::Lattice { .. }, LengthFunction::SquaredTwoNorm) => {
                g.0.iter().map(|x| x * x).sum::<i64>() as f64
            }
            (Group::FreeTwo, _) => g.0.len() as f64,
            (Group::ModularGroup, LengthFunction::Block) => g.0.len() as f64,
            (Group::ModularGroup, _) => {
                g.0.iter().map(|&x| if x == SYL_T2 { 2 } else { 1 }).sum::<i64>() as f64
            }
            (Group::Cyclic { n }, _) => {
                let k = g.0[0];
                k.min(*n as i64 - k) as f64
            }
            (Group::FiniteProduct { factors }, _) => factors
                .iter()
                .zip(&g.0)
                .map(|(&m, &k)| k.min(m as i64 - k))
                .sum::<i64>() as f64,
            (Group::Dihedral { .. }, _) => self.finite_word_length(g) as f64,
            _ => unreachable!("checked above"),
        })
    }

    fn finite_word_length(&self, g: &GroupElement) -> usize {
        // breadth-first search on the Cayley graph with symmetric generators
        let gens = self.symmetric_generators();
        let target = g.clone();
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.identity());
        queue.push_back((self.identity(), 0usize));
        while let Some((x, d)) = queue.pop_front() {
            if x == target {
                return d;
            }
            for s in &gens {
                let y = self.mul(&x, s);
                if seen.insert(y.clone()) {
                    queue.push_back((y, d + 1));
                }
            }
        }
        unreachable!("finite Cayley graph is connected")
    }

    fn symmetric_generators(&self) -> Vec<GroupElement> {
        let mut out: Vec<GroupElement> = Vec::new();
        for g in self.generators() {
            for x in [self.inv(&g), g] {
                if !self.is_identity(&x) && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out
    }

    /// All elements of a finite group in length-lexicographic order.
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        let mut out: Vec<GroupElement> = match self {
            Group::Cyclic { n } => (0..*n as i64).map(|k| GroupElement(vec![k])).collect(),
            Group::Dihedral { n } => (0..2)
                .flat_map(|e| (0..*n as i64).map(move |k| GroupElement(vec![k, e])))
                .collect(),
            Group::FiniteProduct { factors } => {
                let mut acc = vec![Vec::new()];
                for &m in factors {
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix: Vec<i64>| {
                            (0..m as i64).map(move |k| {
                                let mut v = prefix.clone();
                                v.push(k);
                                v
                            })
                        })
                        .collect();
                }
                acc.into_iter().map(GroupElement).collect()
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "full enumeration is only available on finite groups".into(),
                ))
            }
        };
        self.sort_length_lex(&mut out, LengthFunction::Word);
        Ok(out)
    }

    /// Sort by `(L(g), normal form)`.
    pub fn sort_length_lex(&self, elems: &mut [GroupElement], l: LengthFunction) {
        elems.sort_by(|x, y| {
            let lx = self.length(x, l);
            let ly = self.length(y, l);
            lx.partial_cmp(&ly)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| x.cmp(y))
        });
    }

    /// `{g : L(g) <= radius}`, duplicate-free, in length-lexicographic order.
    pub fn ball(&self, radius: f64, l: LengthFunction) -> Result<Vec<GroupElement>> {
        if !(radius >= 0.0) {
            return Err(Error::NegativeRadius(radius));
        }
        self.check_length(l)?;
        // tolerate representation error in radii computed from lengths
        let cutoff = radius + 1e-9;
        let mut out: Vec<GroupElement> = match self {
            Group::Lattice { dim } => {
                let d = *dim as usize;
                let r = match l {
                    LengthFunction::SquaredTwoNorm => cutoff.sqrt().floor() as i64,
                    _ => cutoff.floor() as i64,
                };
                let mut acc: Vec<Vec<i64>> = vec![Vec::new()];
                for _ in 0..d {
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix| {
                            (-r..=r).map(move |k| {
                                let mut v = prefix.clone();
                                v.push(k);
                                v
                            })
                        })
                        .collect();
                }
                acc.into_iter()
                    .map(GroupElement)
                    .filter(|g| self.length(g, l) <= cutoff)
                    .collect()
            }
            Group::FreeTwo | Group::ModularGroup => {
                let mut seen: BTreeSet<GroupElement> = BTreeSet::new();
                let mut frontier = vec![self.identity()];
                seen.insert(self.identity());
                let steps = self.symmetric_generators();
                while !frontier.is_empty() {
                    let mut next = Vec::new();
                    for x in &frontier {
                        for s in &steps {
                            let y = self.mul(x, s);
                            if self.length(&y, l) <= cutoff && seen.insert(y.clone()) {
                                next.push(y);
                            }
                        }
                    }
                    frontier = next;
                }
                seen.into_iter().collect()
            }
            _ => self
                .elements()?
                .into_iter()
                .filter(|g| self.length(g, l) <= cutoff)
                .collect(),
        };
        self.sort_length_lex(&mut out, l);
        Ok(out)
    }

    /// The i-th Følner set: the box `{0..i-1}^d` on ℤ^d, the whole group on
    /// finite families.
    pub fn folner(&self, i: usize) -> Result<Vec<GroupElement>> {
        match self {
            Group::Lattice { dim } => {
                if i == 0 {
                    return Err(Error::InvalidParameter("Følner index must be >= 1".into()));
                }
                let mut acc: Vec<Vec<i64>> = vec![Vec::new()];
                for _ in 0..*dim {
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix| {
                            (0..i as i64).map(move |k| {
                                let mut v = prefix.clone();
                                v.push(k);
                                v
                            })
                        })
                        .collect();
                }
                Ok(acc.into_iter().map(GroupElement).collect())
            }
            g if g.is_finite() => g.elements(),
            _ => Err(Error::NoFolnerSequence(format!("{self:?}"))),
        }
    }

    /// |gF ∩ F| / |F|.
    pub fn folner_ratio(&self, g: &GroupElement, set: &[GroupElement]) -> f64 {
        let members: HashSet<&GroupElement> = set.iter().collect();
        let hits = set
            .iter()
            .filter(|x| members.contains(&self.mul(g, x)))
            .count();
        hits as f64 / set.len() as f64
    }
}

fn power(sym: &str, k: i64) -> String {
    if k == 1 {
        sym.to_string()
    } else {
        format!("{sym}^{k}")
    }
}

fn push_syllable(word: &mut Vec<i64>, x: i64) {
    match (word.last().copied(), x) {
        (Some(SYL_S), SYL_S) => {
            word.pop();
        }
        (Some(a), b) if a != SYL_S && b != SYL_S => {
            word.pop();
            match (a + b) % 3 {
                0 => {}
                r => word.push(r),
            }
        }
        _ => word.push(x),
    }
}

fn split_tokens(word: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for c in word.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                cur.push(c);
                if depth == 0 {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c if depth == 0 && (c.is_whitespace() || c == '*' || c == '+' || c == '·') => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}
