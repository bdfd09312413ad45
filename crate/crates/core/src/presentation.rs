//! Finite presentations used as the base group, with a Dehn-algorithm word
//! problem and bounded conjugacy and centralizer searches.

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::word::{ball, Alphabet, Letter, Symbol, Word};

/// Whether a bounded procedure's answer is known to be complete.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    BoundLimited,
}

/// A generating set for a centralizer, tagged with how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Centralizer {
    pub generators: Vec<Word>,
    pub exactness: Exactness,
}

/// Outcome of a conjugacy query. A witness `t` satisfies `t^-1 u t = v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conjugacy {
    Conjugate(Word),
    NotConjugate,
    Exhausted,
}

/// The measured small-cancellation constant of the symmetrized relators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallCancellation {
    pub lambda: Ratio<usize>,
    /// A longest piece relative to its relator, with the two relators it is
    /// a common prefix of.
    pub witness: Option<(Word, Word, Word)>,
    pub c_prime_sixth: bool,
}

#[derive(Clone)]
pub struct Presentation {
    name: String,
    generators: Vec<Symbol>,
    relators: Vec<Word>,
    alphabet: Alphabet,
    symmetrized: Vec<Word>,
    by_first: HashMap<Letter, Vec<usize>>,
    sc: SmallCancellation,
    torsion_free: bool,
    dehn_override: bool,
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.generators == other.generators
            && self.relators == other.relators
            && self.dehn_override == other.dehn_override
    }
}

impl Eq for Presentation {}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presentation")
            .field("name", &self.name)
            .field("generators", &self.generators)
            .field("relators", &self.relators)
            .field("dehn_override", &self.dehn_override)
            .finish()
    }
}

impl Presentation {
    /// Builds a presentation. Relators are stored cyclically reduced and
    /// relators that reduce to the empty word are dropped.
    pub fn new(name: &str, generators: Vec<Symbol>, relators: Vec<Word>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if !Symbol::is_valid_name(g.as_str()) {
                return Err(Error::Invalid(format!("invalid generator name `{g}`")));
            }
            if generators[..i].contains(g) {
                return Err(Error::Invalid(format!("duplicate generator `{g}`")));
            }
        }
        let alphabet = Alphabet::new(generators.iter().cloned());
        let mut cores = Vec::with_capacity(relators.len());
        for r in &relators {
            alphabet.check(r)?;
            let (core, _) = r.cyclic_reduce();
            if !core.is_empty() {
                cores.push(core);
            }
        }
        let symmetrized = symmetrize(&cores);
        let mut by_first: HashMap<Letter, Vec<usize>> = HashMap::new();
        for (i, r) in symmetrized.iter().enumerate() {
            by_first.entry(r.letters()[0].clone()).or_default().push(i);
        }
        let sc = measure_pieces(&symmetrized);
        let torsion_free = cores.iter().all(|r| r.primitive_root().1 == 1);
        Ok(Presentation {
            name: name.to_string(),
            generators,
            relators: cores,
            alphabet,
            symmetrized,
            by_first,
            sc,
            torsion_free,
            dehn_override: false,
        })
    }

    pub fn free(name: &str, generators: Vec<Symbol>) -> Result<Self> {
        Presentation::new(name, generators, Vec::new())
    }

    /// Allows Dehn's algorithm to be used as the word problem even when the
    /// relators are not C'(1/6). Answers are then only as good as Dehn's
    /// algorithm happens to be for that presentation.
    pub fn with_dehn_override(mut self, on: bool) -> Self {
        self.dehn_override = on;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn generators(&self) -> &[Symbol] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn symmetrized(&self) -> &[Word] {
        &self.symmetrized
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dehn_override(&self) -> bool {
        self.dehn_override
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion_free
    }

    pub fn check_small_cancellation(&self) -> &SmallCancellation {
        &self.sc
    }

    /// True when `wp` is a decision procedure (or the override is set).
    pub fn has_decidable_wp(&self) -> bool {
        self.ensure_supported().is_ok()
    }

    fn ensure_supported(&self) -> Result<()> {
        if self.is_free() {
            return Ok(());
        }
        if !self.torsion_free {
            return Err(Error::UnsupportedPresentation(format!(
                "`{}` has a proper-power relator and is not torsion-free",
                self.name
            )));
        }
        if !self.sc.c_prime_sixth && !self.dehn_override {
            return Err(Error::UnsupportedPresentation(format!(
                "`{}` is not C'(1/6) (lambda = {}) and no override is set",
                self.name, self.sc.lambda
            )));
        }
        Ok(())
    }

    /// Repeatedly replaces a prefix `p` of a symmetrized relator `p s`, with
    /// `|p| > |p s| / 2`, by `s^-1`. Terminates since each step shortens.
    pub fn dehn_reduce(&self, w: &Word) -> Word {
        if self.is_free() {
            return w.clone();
        }
        let mut cur = w.clone();
        'outer: loop {
            let letters = cur.letters();
            for i in 0..letters.len() {
                let Some(cands) = self.by_first.get(&letters[i]) else {
                    continue;
                };
                for &ri in cands {
                    let r = self.symmetrized[ri].letters();
                    let plen = r.len() / 2 + 1;
                    if i + plen <= letters.len() && letters[i..i + plen] == r[..plen] {
                        let mut next: Vec<Letter> = letters[..i].to_vec();
                        next.extend(r[plen..].iter().rev().map(Letter::inv));
                        next.extend_from_slice(&letters[i + plen..]);
                        cur = Word::from_letters(next);
                        continue 'outer;
                    }
                }
            }
            return cur;
        }
    }

    /// The word problem: `Ok(true)` when `w` is trivial.
    pub fn wp(&self, w: &Word) -> Result<bool> {
        self.alphabet.check(w)?;
        self.ensure_supported()?;
        Ok(self.dehn_reduce(w).is_empty())
    }

    /// Dehn reduction of a cyclic word: reduces, cyclically reduces, and
    /// retries on rotations until no rotation admits a Dehn step. Returns the
    /// core and a conjugator `c` with `w = c^-1 core c` in the group.
    pub fn cyclic_dehn(&self, w: &Word) -> (Word, Word) {
        let mut conj = Word::empty();
        let mut cur = self.dehn_reduce(w);
        loop {
            let (core, c) = cur.cyclic_reduce();
            conj = c.mul(&conj);
            let mut improved = None;
            for k in 1..core.len() {
                let rot = core.rotate(k);
                let red = self.dehn_reduce(&rot);
                if red.len() < core.len() {
                    // rot = x^-1 core x with x = core[..k]
                    improved = Some((red, core.subword(0, k)));
                    break;
                }
            }
            match improved {
                Some((red, x)) => {
                    conj = x.mul(&conj);
                    cur = red;
                }
                None => return (core, conj),
            }
        }
    }

    /// Conjugacy search. Exact for free groups; otherwise rotations of Dehn
    /// reduced cyclic cores are combined with all conjugators of length at
    /// most `bound`.
    pub fn conjugacy(&self, u: &Word, v: &Word, bound: usize) -> Result<Conjugacy> {
        self.alphabet.check(u)?;
        self.alphabet.check(v)?;
        self.ensure_supported()?;
        if self.is_free() {
            return Ok(free_conjugacy(u, v));
        }
        let (cu, xu) = self.cyclic_dehn(u);
        let (cv, xv) = self.cyclic_dehn(v);
        if cu.is_empty() || cv.is_empty() {
            return Ok(if cu.is_empty() && cv.is_empty() {
                Conjugacy::Conjugate(Word::empty())
            } else {
                Conjugacy::NotConjugate
            });
        }
        if !self.abelian_images_may_agree(&cu, &cv) {
            return Ok(Conjugacy::NotConjugate);
        }
        let check = |t: &Word| -> bool {
            let e = Word::product([&t.inverse(), u, t, &v.inverse()]);
            self.dehn_reduce(&e).is_empty()
        };
        let prefixes: Vec<Word> = (0..cu.len().max(1)).map(|k| cu.subword(0, k)).collect();
        for b in ball(&self.generators, bound) {
            for x in &prefixes {
                let t = Word::product([&xu.inverse(), x, &b, &xv]);
                if check(&t) {
                    return Ok(Conjugacy::Conjugate(t));
                }
            }
        }
        Ok(Conjugacy::Exhausted)
    }

    /// A generator of the (infinite cyclic) centralizer of a nontrivial `g`.
    pub fn centralizer_base(&self, g: &Word, bound: usize) -> Result<Centralizer> {
        self.alphabet.check(g)?;
        self.ensure_supported()?;
        if self.is_free() {
            if g.is_empty() {
                return Err(Error::Invalid(
                    "centralizer of the identity is the whole group".into(),
                ));
            }
            let (core, c) = g.cyclic_reduce();
            let (root, _) = core.primitive_root();
            return Ok(Centralizer {
                generators: vec![root.conjugate(&c)],
                exactness: Exactness::Exact,
            });
        }
        let (core, c) = self.cyclic_dehn(g);
        if core.is_empty() {
            return Err(Error::Invalid(
                "centralizer of the identity is the whole group".into(),
            ));
        }
        let (mut best, mut best_pow) = core.primitive_root();
        for r in ball(&self.generators, bound) {
            if r.is_empty() || !self.dehn_reduce(&Word::commutator(&r, &core)).is_empty() {
                continue;
            }
            for k in (best_pow + 1)..=core.len() {
                if self
                    .dehn_reduce(&r.pow(k as i64).mul(&core.inverse()))
                    .is_empty()
                {
                    best = r.clone();
                    best_pow = k;
                } else if self
                    .dehn_reduce(&r.pow(-(k as i64)).mul(&core.inverse()))
                    .is_empty()
                {
                    best = r.inverse();
                    best_pow = k;
                }
            }
        }
        Ok(Centralizer {
            generators: vec![best.conjugate(&c)],
            exactness: Exactness::BoundLimited,
        })
    }

    pub fn exponent_vector(&self, w: &Word) -> Vec<i64> {
        let sums = w.exponent_sums();
        self.generators
            .iter()
            .map(|g| sums.get(g).copied().unwrap_or(0))
            .collect()
    }

    /// Necessary condition for triviality: the exponent vector of `w` lies
    /// in the rational span of the relator exponent vectors.
    pub fn abelian_image_rationally_trivial(&self, w: &Word) -> bool {
        let rows: Vec<Vec<i64>> = self
            .relators
            .iter()
            .map(|r| self.exponent_vector(r))
            .collect();
        in_rational_span(&rows, &self.exponent_vector(w))
    }

    fn abelian_images_may_agree(&self, u: &Word, v: &Word) -> bool {
        self.abelian_image_rationally_trivial(&u.mul(&v.inverse()))
    }
}

fn free_conjugacy(u: &Word, v: &Word) -> Conjugacy {
    let (cu, xu) = u.cyclic_reduce();
    let (cv, xv) = v.cyclic_reduce();
    if cu.len() != cv.len() {
        return Conjugacy::NotConjugate;
    }
    if cu.is_empty() {
        return Conjugacy::Conjugate(xu.inverse().mul(&xv));
    }
    for k in 0..cu.len() {
        if cu.rotate(k) == cv {
            let x = cu.subword(0, k);
            return Conjugacy::Conjugate(Word::product([&xu.inverse(), &x, &xv]));
        }
    }
    Conjugacy::NotConjugate
}

/// All cyclic permutations of the relators and their inverses, deduplicated
/// and sorted.
pub fn symmetrize(relators: &[Word]) -> Vec<Word> {
    let mut out = Vec::new();
    for r in relators {
        for base in [r.clone(), r.inverse()] {
            for k in 0..base.len() {
                out.push(base.rotate(k));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn measure_pieces(sym: &[Word]) -> SmallCancellation {
    let mut lambda = Ratio::new(0usize, 1);
    let mut witness = None;
    for (i, r1) in sym.iter().enumerate() {
        for r2 in &sym[i + 1..] {
            let common = r1
                .letters()
                .iter()
                .zip(r2.letters())
                .take_while(|(a, b)| a == b)
                .count();
            if common == 0 {
                continue;
            }
            for (r, other) in [(r1, r2), (r2, r1)] {
                let ratio = Ratio::new(common, r.len());
                if ratio > lambda {
                    lambda = ratio;
                    witness = Some((r.subword(0, common), r.clone(), other.clone()));
                }
            }
        }
    }
    let c_prime_sixth = lambda < Ratio::new(1, 6);
    SmallCancellation {
        lambda,
        witness,
        c_prime_sixth,
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn rank(mut rows: Vec<Vec<i128>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let (a, b) = (rows[rank][c], rows[r][c]);
                let pivot = rows[rank].clone();
                let row = &mut rows[r];
                for k in 0..cols {
                    row[k] = row[k] * a - pivot[k] * b;
                }
                let g = row.iter().fold(0, |g, &x| gcd(g, x));
                if g > 1 {
                    row.iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether `v` lies in the rational span of `rows`.
pub fn in_rational_span(rows: &[Vec<i64>], v: &[i64]) -> bool {
    if v.iter().all(|&x| x == 0) {
        return true;
    }
    let conv = |r: &[i64]| r.iter().map(|&x| x as i128).collect::<Vec<_>>();
    let base: Vec<Vec<i128>> = rows.iter().map(|r| conv(r)).collect();
    let mut ext = base.clone();
    ext.push(conv(v));
    rank(base) == rank(ext)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{random_word, symbols};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn surface() -> Presentation {
        Presentation::new("S2", symbols(&["a", "b", "c", "d"]), vec![w("[a,b][c,d]")]).unwrap()
    }

    fn free2() -> Presentation {
        Presentation::free("F2", symbols(&["a", "b"])).unwrap()
    }

    #[test]
    fn small_cancellation_constants() {
        let f = free2();
        assert_eq!(f.check_small_cancellation().lambda, Ratio::new(0, 1));
        assert!(f.check_small_cancellation().c_prime_sixth);

        let s = surface();
        let sc = s.check_small_cancellation();
        assert_eq!(sc.lambda, Ratio::new(1, 8));
        assert!(sc.c_prime_sixth);
        assert_eq!(sc.witness.as_ref().unwrap().0.len(), 1);
        assert_eq!(s.symmetrized().len(), 16);

        let t = Presentation::new("T", symbols(&["a"]), vec![w("a a")]).unwrap();
        assert!(!t.is_torsion_free());
        assert!(matches!(
            t.wp(&w("a")),
            Err(Error::UnsupportedPresentation(_))
        ));
    }

    #[test]
    fn not_small_cancellation_needs_override() {
        let p = Presentation::new("Z2", symbols(&["x", "y"]), vec![w("[x,y]")]).unwrap();
        assert!(!p.check_small_cancellation().c_prime_sixth);
        assert!(p.wp(&w("x")).is_err());
        let p = p.with_dehn_override(true);
        assert_eq!(p.wp(&w("x y x^-1 y^-1")), Ok(true));
    }

    #[test]
    fn surface_word_problem() {
        let s = surface();
        assert_eq!(s.wp(&w("[a,b][c,d]")), Ok(true));
        assert_eq!(s.wp(&w("a")), Ok(false));
        assert_eq!(s.wp(&w("[c,d]^-1 [a,b]^-1")), Ok(true));
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let len = rng.gen_range(0..=12);
            let u = random_word(&mut rng, s.generators(), len);
            assert_eq!(s.wp(&s.relators()[0].conjugate(&u)), Ok(true));
        }
        assert!(matches!(s.wp(&w("e")), Err(Error::AlphabetMismatch(_))));
    }

    use rand::Rng;

    #[test]
    fn free_conjugacy_examples() {
        let f = free2();
        assert_eq!(
            f.conjugacy(&w("a b"), &w("b a"), 0),
            Ok(Conjugacy::Conjugate(w("a")))
        );
        assert_eq!(
            f.conjugacy(&w("a"), &w("b"), 0),
            Ok(Conjugacy::NotConjugate)
        );
        let u = w("b a b^-1 a b");
        let t = w("a^-1 b b");
        let v = u.conjugate(&t);
        match f.conjugacy(&u, &v, 0).unwrap() {
            Conjugacy::Conjugate(x) => assert_eq!(u.conjugate(&x), v),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn surface_conjugacy_witnesses() {
        let s = surface();
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let u = random_word(&mut rng, s.generators(), 5);
            let tl = rng.gen_range(0..=4);
            let t = random_word(&mut rng, s.generators(), tl);
            let v = u.conjugate(&t);
            match s.conjugacy(&u, &v, 2).unwrap() {
                Conjugacy::Conjugate(x) => {
                    assert_eq!(s.wp(&u.conjugate(&x).mul(&v.inverse())), Ok(true))
                }
                other => panic!("{u} {v}: {other:?}"),
            }
        }
        assert_eq!(
            s.conjugacy(&w("a"), &w("b"), 1),
            Ok(Conjugacy::NotConjugate)
        );
    }

    #[test]
    fn free_centralizers() {
        let f = free2();
        let gen = |s: &str| f.centralizer_base(&w(s), 0).unwrap().generators[0].clone();
        assert_eq!(gen("a a"), w("a"));
        assert_eq!(gen("a b"), w("a b"));
        assert_eq!(gen("(a b a^-1)^3"), w("a b a^-1"));
        assert!(f.centralizer_base(&Word::empty(), 0).is_err());
    }

    #[test]
    fn surface_centralizer_commutes() {
        let s = surface();
        let c = s.centralizer_base(&w("a a"), 2).unwrap();
        assert_eq!(c.exactness, Exactness::BoundLimited);
        assert_eq!(c.generators, vec![w("a")]);
    }

    #[test]
    fn rational_span() {
        assert!(in_rational_span(&[vec![2, 0]], &[1, 0]));
        assert!(!in_rational_span(&[vec![2, 0]], &[0, 1]));
        assert!(in_rational_span(&[], &[0, 0]));
        assert!(!in_rational_span(&[], &[0, 1]));
    }
}
