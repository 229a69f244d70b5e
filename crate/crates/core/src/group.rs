//! Free-group words over `a, b`, turnover presentations and Fox calculus.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("cone orders must be at least 2, got ({0}, {1}, {2})")]
    InvalidOrder(u32, u32, u32),
    #[error("invalid letter {0:?} in word (expected one of a, A, b, B)")]
    InvalidLetter(char),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Generator {
    A,
    B,
}

/// A generator or its inverse. Written `a, A, b, B`; capitals are inverses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn generator(self) -> Generator {
        match self {
            Letter::A | Letter::AInv => Generator::A,
            Letter::B | Letter::BInv => Generator::B,
        }
    }

    pub fn is_inverse(self) -> bool {
        matches!(self, Letter::AInv | Letter::BInv)
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Result<Letter, GroupError> {
        match c {
            'a' => Ok(Letter::A),
            'A' => Ok(Letter::AInv),
            'b' => Ok(Letter::B),
            'B' => Ok(Letter::BInv),
            other => Err(GroupError::InvalidLetter(other)),
        }
    }
}

impl From<Generator> for Letter {
    fn from(g: Generator) -> Letter {
        match g {
            Generator::A => Letter::A,
            Generator::B => Letter::B,
        }
    }
}

/// A freely reduced word. Every constructor reduces.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn generator(g: Generator) -> Word {
        Word::letter(g.into())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Free reduction; words are kept reduced, so this is the identity map
    /// on anything built through the public constructors.
    pub fn reduce(&self) -> Word {
        Word::new(self.0.iter().copied())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        (0..n.unsigned_abs()).fold(Word::identity(), |acc, _| acc.concat(&base))
    }

    /// Cyclic reduction: strip matching inverse letters from both ends.
    pub fn cyclically_reduced(&self) -> Word {
        let mut s = self.0.as_slice();
        while s.len() >= 2 && s[0] == s[s.len() - 1].inverse() {
            s = &s[1..s.len() - 1];
        }
        Word(s.to_vec())
    }

    /// Whether the two words are conjugate in the free group.
    pub fn is_conjugate_to(&self, other: &Word) -> bool {
        let u = self.cyclically_reduced().0;
        let v = other.cyclically_reduced().0;
        if u.len() != v.len() {
            return false;
        }
        if u.is_empty() {
            return true;
        }
        (0..u.len()).any(|shift| u.iter().cycle().skip(shift).take(u.len()).eq(v.iter()))
    }

    /// All reduced words of length at most `max_len`, shortlex ordered.
    pub fn ball(max_len: usize) -> Vec<Word> {
        let letters = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];
        let mut layer = vec![Word::identity()];
        let mut all = layer.clone();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for &l in &letters {
                    if w.0.last() != Some(&l.inverse()) {
                        let mut v = w.0.clone();
                        v.push(l);
                        next.push(Word(v));
                    }
                }
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        all
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        self.0.iter().try_for_each(|l| write!(f, "{}", l.as_char()))
    }
}

impl FromStr for Word {
    type Err = GroupError;

    /// Accepts `""` or `"1"` for the identity.
    fn from_str(s: &str) -> Result<Word, GroupError> {
        let s = s.trim();
        if s == "1" {
            return Ok(Word::identity());
        }
        s.chars().map(Letter::from_char).collect::<Result<Vec<_>, _>>().map(Word::new)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Curvature type of a turnover, decided exactly from `Σ 1/nᵢ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Spherical,
    Euclidean,
    Hyperbolic,
}

/// `⟨a, b | a^n₁, b^n₂, (ab)^n₃⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[u32; 3]", into = "[u32; 3]")]
pub struct TurnoverPresentation {
    orders: [u32; 3],
}

impl TryFrom<[u32; 3]> for TurnoverPresentation {
    type Error = GroupError;
    fn try_from(o: [u32; 3]) -> Result<Self, GroupError> {
        TurnoverPresentation::new(o[0], o[1], o[2])
    }
}

impl From<TurnoverPresentation> for [u32; 3] {
    fn from(p: TurnoverPresentation) -> [u32; 3] {
        p.orders
    }
}

impl TurnoverPresentation {
    pub fn new(n1: u32, n2: u32, n3: u32) -> Result<Self, GroupError> {
        if n1 < 2 || n2 < 2 || n3 < 2 {
            return Err(GroupError::InvalidOrder(n1, n2, n3));
        }
        Ok(Self { orders: [n1, n2, n3] })
    }

    /// The `(3,3,3)` turnover.
    pub fn triangle333() -> Self {
        Self { orders: [3, 3, 3] }
    }

    pub fn orders(&self) -> [u32; 3] {
        self.orders
    }

    pub fn geometry(&self) -> Geometry {
        let [a, b, c] = self.orders.map(u64::from);
        let lhs = b * c + a * c + a * b;
        let rhs = a * b * c;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => Geometry::Spherical,
            std::cmp::Ordering::Equal => Geometry::Euclidean,
            std::cmp::Ordering::Less => Geometry::Hyperbolic,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        self.geometry() == Geometry::Euclidean
    }

    /// Generators of the three cone-point stabilizers: `a`, `b`, `ab`.
    pub fn cone_point_generators() -> [Word; 3] {
        [Word::generator(Generator::A), Word::generator(Generator::B), "ab".parse().expect("literal word")]
    }

    /// `a^n₁`, `b^n₂`, `(ab)^n₃`.
    pub fn relators(&self) -> [Word; 3] {
        let gens = Self::cone_point_generators();
        [0, 1, 2].map(|i| gens[i].pow(self.orders[i] as i64))
    }
}

/// Generators of the rank-two lattice subgroup: `(a²b, ba²)`.
pub fn gamma0_generators() -> (Word, Word) {
    ("aab".parse().expect("literal word"), "baa".parse().expect("literal word"))
}

/// Finite rational combination of reduced words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupRingElement {
    terms: BTreeMap<Word, BigRational>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_word(w: Word) -> Self {
        let mut e = Self::zero();
        e.add_term(w, BigRational::one());
        e
    }

    pub fn add_term(&mut self, w: Word, c: BigRational) {
        let entry = self.terms.entry(w.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> BigRational {
        self.terms.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    /// `u · self`.
    pub fn left_mul(&self, u: &Word) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add_term(u.concat(w), c.clone());
        }
        out
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "({c})*{w}")?;
            }
        }
        Ok(())
    }
}

/// Fox derivative `∂w/∂g`.
pub fn fox_derivative(w: &Word, g: Generator) -> GroupRingElement {
    let mut out = GroupRingElement::zero();
    let letters = w.letters();
    for (i, &l) in letters.iter().enumerate() {
        if l.generator() != g {
            continue;
        }
        if l.is_inverse() {
            out.add_term(Word::new(letters[..=i].iter().copied()), -BigRational::one());
        } else {
            out.add_term(Word::new(letters[..i].iter().copied()), BigRational::one());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        proptest::collection::vec(prop_oneof![Just(Letter::A), Just(Letter::AInv), Just(Letter::B), Just(Letter::BInv)], 0..12)
            .prop_map(Word::new)
    }

    fn raw_letters() -> impl Strategy<Value = Vec<Letter>> {
        proptest::collection::vec(prop_oneof![Just(Letter::A), Just(Letter::AInv), Just(Letter::B), Just(Letter::BInv)], 0..16)
    }

    #[test]
    fn reduction_examples() {
        assert!(w("aA").is_empty());
        assert_eq!(w("aabBa"), w("aaa"));
        assert_eq!(w("aaa").len(), 3);
        let (g1, g2) = gamma0_generators();
        assert_eq!(g1.concat(&g2).len(), 6);
        assert_eq!(w("1"), Word::identity());
        assert_eq!(Word::identity().to_string(), "1");
        assert!("abc".parse::<Word>().is_err());
    }

    #[test]
    fn lattice_generators() {
        let (g1, g2) = gamma0_generators();
        assert_eq!(g1.letters(), &[Letter::A, Letter::A, Letter::B]);
        assert_eq!(g2.letters(), &[Letter::B, Letter::A, Letter::A]);
        assert!(!g1.is_conjugate_to(&g2.inverse()));
        assert!(!g2.is_conjugate_to(&g1.inverse()));
        // a²b and ba² are conjugate to each other (by a²), as a sanity check
        assert!(g1.is_conjugate_to(&g2));
    }

    #[test]
    fn geometry_of_turnovers() {
        for o in [[3, 3, 3], [2, 3, 6], [2, 4, 4], [6, 3, 2]] {
            assert_eq!(TurnoverPresentation::new(o[0], o[1], o[2]).unwrap().geometry(), Geometry::Euclidean);
        }
        assert_eq!(TurnoverPresentation::new(2, 3, 7).unwrap().geometry(), Geometry::Hyperbolic);
        assert_eq!(TurnoverPresentation::new(2, 3, 5).unwrap().geometry(), Geometry::Spherical);
        assert!(TurnoverPresentation::new(1, 3, 3).is_err());
        let r = TurnoverPresentation::triangle333().relators();
        assert_eq!(r[2], w("ababab"));
    }

    #[test]
    fn fox_examples() {
        let d = fox_derivative(&w("a"), Generator::A);
        assert_eq!(d, GroupRingElement::from_word(Word::identity()));
        let d = fox_derivative(&w("aaa"), Generator::A);
        assert_eq!(d.len(), 3);
        for p in ["1", "a", "aa"] {
            assert!(d.coefficient(&w(p)).is_one());
        }
        assert_eq!(fox_derivative(&w("ab"), Generator::B), GroupRingElement::from_word(w("a")));
        let d = fox_derivative(&w("A"), Generator::A);
        assert_eq!(d.coefficient(&w("A")), -BigRational::one());
    }

    #[test]
    fn serde_round_trip() {
        let p = TurnoverPresentation::new(2, 4, 4).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "[2,4,4]");
        assert_eq!(serde_json::from_str::<TurnoverPresentation>(&json).unwrap(), p);
        assert!(serde_json::from_str::<TurnoverPresentation>("[1,2,3]").is_err());
        assert_eq!(serde_json::to_string(&w("abAB")).unwrap(), "\"abAB\"");
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(letters in raw_letters()) {
            let once = Word::new(letters);
            prop_assert_eq!(once.reduce(), once.clone());
            prop_assert!(once.letters().windows(2).all(|p| p[0] != p[1].inverse()));
        }

        #[test]
        fn concat_is_associative(u in arb_word(), v in arb_word(), x in arb_word()) {
            prop_assert_eq!(u.concat(&v).concat(&x), u.concat(&v.concat(&x)));
        }

        #[test]
        fn inverse_cancels(u in arb_word()) {
            prop_assert!(u.concat(&u.inverse()).is_empty());
        }

        #[test]
        fn fox_product_rule(u in arb_word(), v in arb_word()) {
            for g in [Generator::A, Generator::B] {
                let lhs = fox_derivative(&u.concat(&v), g);
                let rhs = fox_derivative(&u, g).add(&fox_derivative(&v, g).left_mul(&u));
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn display_round_trip(u in arb_word()) {
            prop_assert_eq!(u.to_string().parse::<Word>().unwrap(), u);
        }

        #[test]
        fn conjugates_are_detected(u in arb_word(), c in arb_word()) {
            let conj = c.concat(&u).concat(&c.inverse());
            prop_assert!(u.is_conjugate_to(&conj));
        }
    }
}
