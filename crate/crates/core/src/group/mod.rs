//! Groups with decidable normal forms: free, free abelian and finite cyclic
//! groups closed under direct and free products.

mod cayley;
pub mod probe;
mod space;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cayley::{cayley_ball, coned_cayley_ball, CayleyBall, ConedCayleyBall};
pub use space::{ActionContext, BallAction, Point, SideContext, SymbolicSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("cannot parse word `{word}`: {msg}")]
    BadWord { word: String, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("element {0} lies outside the ball")]
    ElementOutsideBall(String),
    #[error("ball too small: {0}")]
    BallTooSmall(String),
    #[error("generator index {0} out of range")]
    BadIndex(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupSpec {
    Free { rank: usize },
    FreeAbelian { rank: usize },
    Cyclic { order: u64 },
    Product { factors: Vec<GroupSpec> },
    FreeProduct { factors: Vec<GroupSpec> },
}

/// Normal form of a group element. Free-group letters are `+(i+1)` for
/// generator `i` and `-(i+1)` for its inverse; free-product elements are
/// reduced alternating syllables tagged with their factor index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Free(Vec<i32>),
    Abelian(Vec<i64>),
    Cyclic(u64),
    Product(Vec<Element>),
    FreeProduct(Vec<(usize, Element)>),
}

impl GroupSpec {
    pub fn basis_count(&self) -> usize {
        match self {
            GroupSpec::Free { rank } | GroupSpec::FreeAbelian { rank } => *rank,
            GroupSpec::Cyclic { .. } => 1,
            GroupSpec::Product { factors } | GroupSpec::FreeProduct { factors } => {
                factors.iter().map(|f| f.basis_count()).sum()
            }
        }
    }

    pub fn validate(&self) -> Result<(), GroupError> {
        match self {
            GroupSpec::Cyclic { order } if *order < 2 => {
                Err(GroupError::UnsupportedGroup(format!("cyclic group of order {order}")))
            }
            GroupSpec::Product { factors } | GroupSpec::FreeProduct { factors } => {
                if factors.is_empty() {
                    return Err(GroupError::UnsupportedGroup("empty product".into()));
                }
                factors.iter().try_for_each(|f| f.validate())
            }
            _ => Ok(()),
        }
    }

    fn offsets(factors: &[GroupSpec]) -> Vec<usize> {
        let mut out = Vec::with_capacity(factors.len() + 1);
        let mut acc = 0;
        out.push(0);
        for f in factors {
            acc += f.basis_count();
            out.push(acc);
        }
        out
    }

    pub fn identity(&self) -> Element {
        match self {
            GroupSpec::Free { .. } => Element::Free(Vec::new()),
            GroupSpec::FreeAbelian { rank } => Element::Abelian(vec![0; *rank]),
            GroupSpec::Cyclic { .. } => Element::Cyclic(0),
            GroupSpec::Product { factors } => Element::Product(factors.iter().map(|f| f.identity()).collect()),
            GroupSpec::FreeProduct { .. } => Element::FreeProduct(Vec::new()),
        }
    }

    pub fn is_identity(&self, g: &Element) -> bool {
        *g == self.identity()
    }

    /// Basis generator `i` (global index over all factors).
    pub fn basis(&self, i: usize) -> Result<Element, GroupError> {
        if i >= self.basis_count() {
            return Err(GroupError::BadIndex(i));
        }
        Ok(match self {
            GroupSpec::Free { .. } => Element::Free(vec![i as i32 + 1]),
            GroupSpec::FreeAbelian { rank } => {
                let mut v = vec![0; *rank];
                v[i] = 1;
                Element::Abelian(v)
            }
            GroupSpec::Cyclic { .. } => Element::Cyclic(1),
            GroupSpec::Product { factors } => {
                let off = Self::offsets(factors);
                let f = off.partition_point(|&o| o <= i) - 1;
                let mut parts: Vec<Element> = factors.iter().map(|x| x.identity()).collect();
                parts[f] = factors[f].basis(i - off[f])?;
                Element::Product(parts)
            }
            GroupSpec::FreeProduct { factors } => {
                let off = Self::offsets(factors);
                let f = off.partition_point(|&o| o <= i) - 1;
                Element::FreeProduct(vec![(f, factors[f].basis(i - off[f])?)])
            }
        })
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        match (self, a, b) {
            (GroupSpec::Free { .. }, Element::Free(x), Element::Free(y)) => {
                let mut out = x.clone();
                for &l in y {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Element::Free(out)
            }
            (GroupSpec::FreeAbelian { .. }, Element::Abelian(x), Element::Abelian(y)) => {
                Element::Abelian(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupSpec::Cyclic { order }, Element::Cyclic(x), Element::Cyclic(y)) => Element::Cyclic((x + y) % order),
            (GroupSpec::Product { factors }, Element::Product(x), Element::Product(y)) => {
                Element::Product(factors.iter().zip(x.iter().zip(y)).map(|(f, (p, q))| f.mul(p, q)).collect())
            }
            (GroupSpec::FreeProduct { factors }, Element::FreeProduct(x), Element::FreeProduct(y)) => {
                let mut out = x.clone();
                let mut rest = y.iter();
                for (f, s) in rest.by_ref() {
                    match out.last_mut() {
                        Some((lf, ls)) if lf == f => {
                            let m = factors[*f].mul(ls, s);
                            if factors[*f].is_identity(&m) {
                                out.pop();
                                continue;
                            }
                            *ls = m;
                            break;
                        }
                        _ => {
                            out.push((*f, s.clone()));
                            break;
                        }
                    }
                }
                out.extend(rest.cloned());
                Element::FreeProduct(out)
            }
            _ => panic!("element does not belong to group {self:?}"),
        }
    }

    pub fn inv(&self, a: &Element) -> Element {
        match (self, a) {
            (GroupSpec::Free { .. }, Element::Free(x)) => Element::Free(x.iter().rev().map(|l| -l).collect()),
            (GroupSpec::FreeAbelian { .. }, Element::Abelian(x)) => Element::Abelian(x.iter().map(|v| -v).collect()),
            (GroupSpec::Cyclic { order }, Element::Cyclic(x)) => Element::Cyclic((order - x) % order),
            (GroupSpec::Product { factors }, Element::Product(x)) => {
                Element::Product(factors.iter().zip(x).map(|(f, p)| f.inv(p)).collect())
            }
            (GroupSpec::FreeProduct { factors }, Element::FreeProduct(x)) => {
                Element::FreeProduct(x.iter().rev().map(|(f, s)| (*f, factors[*f].inv(s))).collect())
            }
            _ => panic!("element does not belong to group {self:?}"),
        }
    }

    pub fn pow(&self, a: &Element, k: i64) -> Element {
        let base = if k < 0 { self.inv(a) } else { a.clone() };
        let mut out = self.identity();
        for _ in 0..k.unsigned_abs() {
            out = self.mul(&out, &base);
        }
        out
    }

    /// Canonical representative of the left coset `g H`, where `H` is the
    /// subgroup generated by the basis generators flagged in `mask`.
    pub fn coset_rep(&self, g: &Element, mask: &[bool]) -> Element {
        match (self, g) {
            (GroupSpec::Free { .. }, Element::Free(x)) => {
                let mut out = x.clone();
                while let Some(&l) = out.last() {
                    if mask[(l.unsigned_abs() - 1) as usize] {
                        out.pop();
                    } else {
                        break;
                    }
                }
                Element::Free(out)
            }
            (GroupSpec::FreeAbelian { .. }, Element::Abelian(x)) => {
                Element::Abelian(x.iter().enumerate().map(|(i, &v)| if mask[i] { 0 } else { v }).collect())
            }
            (GroupSpec::Cyclic { .. }, Element::Cyclic(x)) => Element::Cyclic(if mask[0] { 0 } else { *x }),
            (GroupSpec::Product { factors }, Element::Product(x)) => {
                let off = Self::offsets(factors);
                Element::Product(
                    factors.iter().enumerate().map(|(i, f)| f.coset_rep(&x[i], &mask[off[i]..off[i + 1]])).collect(),
                )
            }
            (GroupSpec::FreeProduct { factors }, Element::FreeProduct(x)) => {
                let off = Self::offsets(factors);
                let mut out = x.clone();
                while let Some((f, s)) = out.last().cloned() {
                    let r = factors[f].coset_rep(&s, &mask[off[f]..off[f + 1]]);
                    if factors[f].is_identity(&r) {
                        out.pop();
                    } else {
                        *out.last_mut().unwrap() = (f, r);
                        break;
                    }
                }
                Element::FreeProduct(out)
            }
            _ => panic!("element does not belong to group {self:?}"),
        }
    }

    /// Basis-generator word `[(generator, exponent)]` multiplying to `g`.
    pub fn word(&self, g: &Element) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        self.word_into(g, 0, &mut out);
        out
    }

    fn word_into(&self, g: &Element, base: usize, out: &mut Vec<(usize, i64)>) {
        let push = |out: &mut Vec<(usize, i64)>, i: usize, e: i64| {
            if e == 0 {
                return;
            }
            match out.last_mut() {
                Some((j, x)) if *j == i => *x += e,
                _ => out.push((i, e)),
            }
        };
        match (self, g) {
            (GroupSpec::Free { .. }, Element::Free(x)) => {
                for &l in x {
                    push(out, base + (l.unsigned_abs() - 1) as usize, l.signum() as i64);
                }
            }
            (GroupSpec::FreeAbelian { .. }, Element::Abelian(x)) => {
                for (i, &v) in x.iter().enumerate() {
                    push(out, base + i, v);
                }
            }
            (GroupSpec::Cyclic { order }, Element::Cyclic(x)) => {
                let x = *x as i64;
                let o = *order as i64;
                let e = if 2 * x > o { x - o } else { x };
                push(out, base, e);
            }
            (GroupSpec::Product { factors }, Element::Product(x)) => {
                let off = Self::offsets(factors);
                for (i, f) in factors.iter().enumerate() {
                    f.word_into(&x[i], base + off[i], out);
                }
            }
            (GroupSpec::FreeProduct { factors }, Element::FreeProduct(x)) => {
                let off = Self::offsets(factors);
                for (f, s) in x {
                    factors[*f].word_into(s, base + off[*f], out);
                }
            }
            _ => panic!("element does not belong to group {self:?}"),
        }
    }

    /// Number of basis generators contributed by each free-product factor.
    pub fn factor_range(&self, factor: usize) -> Option<(usize, usize)> {
        match self {
            GroupSpec::FreeProduct { factors } => {
                let off = Self::offsets(factors);
                (factor < factors.len()).then(|| (off[factor], off[factor + 1]))
            }
            _ => None,
        }
    }

    pub fn factors(&self) -> &[GroupSpec] {
        match self {
            GroupSpec::Product { factors } | GroupSpec::FreeProduct { factors } => factors,
            _ => &[],
        }
    }

    /// Embeds an element of free-product factor `f`.
    pub fn embed_factor(&self, f: usize, x: &Element) -> Element {
        match self {
            GroupSpec::FreeProduct { factors } => {
                if factors[f].is_identity(x) {
                    Element::FreeProduct(Vec::new())
                } else {
                    Element::FreeProduct(vec![(f, x.clone())])
                }
            }
            _ => panic!("not a free product"),
        }
    }

    /// Inverse of [`embed_factor`](Self::embed_factor); `None` when `g` is not in factor `f`.
    pub fn project_factor(&self, f: usize, g: &Element) -> Option<Element> {
        match (self, g) {
            (GroupSpec::FreeProduct { factors }, Element::FreeProduct(x)) => match x.as_slice() {
                [] => Some(factors[f].identity()),
                [(h, s)] if *h == f => Some(s.clone()),
                _ => None,
            },
            _ => None,
        }
    }

    /// Number of syllables of a free-product element (0 for other groups).
    pub fn syllable_length(&self, g: &Element) -> usize {
        match g {
            Element::FreeProduct(x) => x.len(),
            _ => 0,
        }
    }
}

/// Coordinate subgroup: generated by a subset of the basis generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    pub mask: Vec<bool>,
}

impl Subgroup {
    pub fn trivial(n: usize) -> Self {
        Subgroup { mask: vec![false; n] }
    }

    pub fn whole(n: usize) -> Self {
        Subgroup { mask: vec![true; n] }
    }

    pub fn from_generators(n: usize, gens: &[usize]) -> Self {
        let mut mask = vec![false; n];
        for &g in gens {
            mask[g] = true;
        }
        Subgroup { mask }
    }

    pub fn is_trivial(&self) -> bool {
        self.mask.iter().all(|m| !m)
    }

    pub fn generators(&self) -> Vec<usize> {
        self.mask.iter().enumerate().filter(|(_, m)| **m).map(|(i, _)| i).collect()
    }
}

/// A group together with generator names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub spec: GroupSpec,
    pub names: Vec<String>,
}

pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| if i < 26 { ((b'a' + i as u8) as char).to_string() } else { format!("g{i}") }).collect()
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Self, GroupError> {
        spec.validate()?;
        let n = spec.basis_count();
        Ok(Group { spec, names: default_names(n) })
    }

    pub fn with_names(spec: GroupSpec, names: Vec<String>) -> Result<Self, GroupError> {
        spec.validate()?;
        if names.len() != spec.basis_count() {
            return Err(GroupError::UnsupportedGroup(format!(
                "{} names given for {} generators",
                names.len(),
                spec.basis_count()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') || n == "1" {
                return Err(GroupError::UnsupportedGroup(format!("bad generator name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(GroupError::UnsupportedGroup(format!("duplicate generator name `{n}`")));
            }
        }
        Ok(Group { spec, names })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> Element {
        self.spec.identity()
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        self.spec.mul(a, b)
    }

    pub fn inv(&self, a: &Element) -> Element {
        self.spec.inv(a)
    }

    pub fn is_identity(&self, g: &Element) -> bool {
        self.spec.is_identity(g)
    }

    pub fn generator(&self, name: &str) -> Result<usize, GroupError> {
        self.names.iter().position(|n| n == name).ok_or_else(|| GroupError::UnknownGenerator(name.into()))
    }

    pub fn basis(&self, i: usize) -> Element {
        self.spec.basis(i).expect("basis index")
    }

    pub fn from_word(&self, w: &[(usize, i64)]) -> Element {
        w.iter().fold(self.identity(), |acc, &(i, e)| self.mul(&acc, &self.spec.pow(&self.basis(i), e)))
    }

    /// Parses words such as `a^2 b^-1 z`, `a*b` or `1`.
    pub fn parse(&self, word: &str) -> Result<Element, GroupError> {
        let bad = |msg: &str| GroupError::BadWord { word: word.to_string(), msg: msg.to_string() };
        let mut out = Vec::new();
        let chars: Vec<char> = word.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '*' || c == '.' {
                i += 1;
                continue;
            }
            if c == '1' && (i + 1 == chars.len() || !chars[i + 1].is_ascii_alphanumeric()) {
                i += 1;
                continue;
            }
            if !(c.is_ascii_alphabetic() || c == '_') {
                return Err(bad(&format!("unexpected `{c}`")));
            }
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            let gen = self.generator(&name)?;
            let mut exp = 1i64;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let s = i;
                if i < chars.len() && chars[i] == '-' {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[s..i].iter().collect();
                exp = digits.parse().map_err(|_| bad("bad exponent"))?;
            }
            out.push((gen, exp));
        }
        Ok(self.from_word(&out))
    }

    pub fn format(&self, g: &Element) -> String {
        let w = self.spec.word(g);
        if w.is_empty() {
            return "1".to_string();
        }
        let mut s = String::new();
        for (k, (i, e)) in w.iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            s.push_str(&self.names[*i]);
            if *e != 1 {
                write!(s, "^{e}").unwrap();
            }
        }
        s
    }

    pub fn coset_rep(&self, g: &Element, h: &Subgroup) -> Element {
        self.spec.coset_rep(g, &h.mask)
    }

    pub fn contains(&self, h: &Subgroup, g: &Element) -> bool {
        self.is_identity(&self.coset_rep(g, h))
    }

    /// Subgroup from generator names.
    pub fn subgroup(&self, names: &[impl AsRef<str>]) -> Result<Subgroup, GroupError> {
        let idx = names.iter().map(|n| self.generator(n.as_ref())).collect::<Result<Vec<_>, _>>()?;
        Ok(Subgroup::from_generators(self.rank(), &idx))
    }

    /// Basis generators as elements, in index order.
    pub fn basis_elements(&self) -> Vec<Element> {
        (0..self.rank()).map(|i| self.basis(i)).collect()
    }

    /// Factor `f` of a free product, with its generator names.
    pub fn factor_group(&self, f: usize) -> Option<Group> {
        let (a, b) = self.spec.factor_range(f)?;
        Some(Group { spec: self.spec.factors()[f].clone(), names: self.names[a..b].to_vec() })
    }

    /// Subgroup of a free product made of factor-level subgroups.
    pub fn free_product_subgroup(&self, parts: &[(usize, &Subgroup)]) -> Subgroup {
        let mut mask = vec![false; self.rank()];
        for (f, s) in parts {
            let (a, _) = self.spec.factor_range(*f).expect("free product factor");
            for (i, m) in s.mask.iter().enumerate() {
                mask[a + i] |= *m;
            }
        }
        Subgroup { mask }
    }

    pub fn factor_subgroup(&self, f: usize) -> Subgroup {
        let (a, b) = self.spec.factor_range(f).expect("free product factor");
        let mut mask = vec![false; self.rank()];
        for m in &mut mask[a..b] {
            *m = true;
        }
        Subgroup { mask }
    }
}
