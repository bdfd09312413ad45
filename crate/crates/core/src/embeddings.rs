//! Embeddings of coordinate groups of triangular quasi-quadratic (NTQ)
//! systems into towers of centralizer extensions.
//!
//! Each level of an NTQ system is handled over the tower built for the
//! levels below it. The result of a level is a bigger tower together with
//! images of the level's variables; the generators of the old tower map to
//! themselves.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::equations::{Assignment, EqSystem};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::presentation::Presentation;
use crate::quadratic::{
    detect_general_position, to_standard_form, Atom, GeneralPosition, StandardQuadratic,
};
use crate::tower::{GroupHom, HomStatus, Injectivity, SourceGroup, Tower};
use crate::word::{ball, Alphabet, Symbol, Word};

const REGULAR: &str =
    "regular quadratic equation: the embedding needs Kharlampovich-Myasnikov, Theorem 4.1, which is not implemented";

/// One block of an NTQ system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NtqLevel {
    /// A quadratic equation; its variables are the letters that are not
    /// generators of the group below.
    Quadratic { equation: Word },
    /// The variables commute with each other and with `C(center_of)`.
    CentralizerExt { center_of: Word, vars: Vec<Symbol> },
    /// Pairwise commuting variables, free product with the group below.
    FreeAbelian { vars: Vec<Symbol> },
    /// Free product with a free group.
    Free { vars: Vec<Symbol> },
}

impl NtqLevel {
    pub fn form(&self) -> &'static str {
        match self {
            NtqLevel::Quadratic { .. } => "I",
            NtqLevel::CentralizerExt { .. } => "II",
            NtqLevel::FreeAbelian { .. } => "III",
            NtqLevel::Free { .. } => "IV",
        }
    }

    /// Variables of the level, given the alphabet of the group below.
    pub fn variables(&self, below: &Alphabet) -> Vec<Symbol> {
        match self {
            NtqLevel::Quadratic { equation } => {
                let mut out: Vec<Symbol> = Vec::new();
                for l in equation.letters() {
                    if !below.contains(&l.symbol) && !out.contains(&l.symbol) {
                        out.push(l.symbol.clone());
                    }
                }
                out
            }
            NtqLevel::CentralizerExt { vars, .. }
            | NtqLevel::FreeAbelian { vars }
            | NtqLevel::Free { vars } => vars.clone(),
        }
    }

    /// Defining relators of the level over the group below.
    pub fn relators(&self, vars: &[Symbol]) -> Vec<Word> {
        let commuting = |out: &mut Vec<Word>| {
            for (i, x) in vars.iter().enumerate() {
                for y in &vars[i + 1..] {
                    out.push(Word::commutator(&Word::symbol(x), &Word::symbol(y)));
                }
            }
        };
        let mut out = Vec::new();
        match self {
            NtqLevel::Quadratic { equation } => out.push(equation.clone()),
            NtqLevel::CentralizerExt { center_of, .. } => {
                for x in vars {
                    out.push(Word::commutator(&Word::symbol(x), center_of));
                }
                commuting(&mut out);
            }
            NtqLevel::FreeAbelian { .. } => commuting(&mut out),
            NtqLevel::Free { .. } => {}
        }
        out
    }

    fn substitute(&self, images: &Assignment) -> NtqLevel {
        match self {
            NtqLevel::Quadratic { equation } => NtqLevel::Quadratic {
                equation: equation.substitute_map(images),
            },
            NtqLevel::CentralizerExt { center_of, vars } => NtqLevel::CentralizerExt {
                center_of: center_of.substitute_map(images),
                vars: vars.clone(),
            },
            other => other.clone(),
        }
    }
}

/// Levels are listed outermost first, so the last level sits directly on
/// the base group.
#[derive(Clone, Debug, PartialEq)]
pub struct NtqSystem {
    pub name: String,
    pub base: Arc<Presentation>,
    pub levels: Vec<NtqLevel>,
}

impl NtqSystem {
    pub fn new(name: &str, base: Arc<Presentation>, levels: Vec<NtqLevel>) -> Result<Self> {
        let s = NtqSystem {
            name: name.to_string(),
            base,
            levels,
        };
        let mut seen: BTreeSet<Symbol> = s.base.generators().iter().cloned().collect();
        for i in (0..s.levels.len()).rev() {
            let below = s.alphabet_below(i);
            let vars = s.levels[i].variables(&below);
            for v in &vars {
                if !Symbol::is_valid_name(v.as_str()) {
                    return Err(Error::Invalid(format!("invalid variable name `{v}`")));
                }
                if !seen.insert(v.clone()) {
                    return Err(Error::Invalid(format!(
                        "variable `{v}` is declared twice or clashes with a generator"
                    )));
                }
            }
            match &s.levels[i] {
                NtqLevel::Quadratic { equation } => {
                    if vars.is_empty() {
                        return Err(Error::Invalid(format!(
                            "quadratic level `{equation}` has no variables"
                        )));
                    }
                }
                NtqLevel::CentralizerExt { center_of, vars } => {
                    below.check(center_of)?;
                    if vars.is_empty() {
                        return Err(Error::Invalid(
                            "centralizer level needs at least one variable".into(),
                        ));
                    }
                }
                _ => {}
            }
        }
        Ok(s)
    }

    fn alphabet_below(&self, i: usize) -> Alphabet {
        let mut syms = self.base.generators().to_vec();
        for j in (i + 1..self.levels.len()).rev() {
            let below = Alphabet::new(syms.clone());
            syms.extend(self.levels[j].variables(&below));
        }
        Alphabet::new(syms)
    }

    /// Variables of level `i`.
    pub fn level_variables(&self, i: usize) -> Vec<Symbol> {
        self.levels[i].variables(&self.alphabet_below(i))
    }

    /// All variables, innermost level first.
    pub fn variables(&self) -> Vec<Symbol> {
        (0..self.levels.len())
            .rev()
            .flat_map(|i| self.level_variables(i))
            .collect()
    }

    /// The presentation of the coordinate group: base generators and all
    /// variables, base relators and every level's relators.
    pub fn coordinate_presentation(&self) -> Result<Presentation> {
        let mut gens = self.base.generators().to_vec();
        gens.extend(self.variables());
        let mut rels = self.base.relators().to_vec();
        for i in (0..self.levels.len()).rev() {
            rels.extend(self.levels[i].relators(&self.level_variables(i)));
        }
        Presentation::new(&format!("{}_coord", self.name), gens, rels)
    }
}

/// Which construction handled (part of) a level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Case {
    /// Form IV: free letters, embedded pairwise by three extensions.
    Free {
        letters: usize,
    },
    /// Form III on two letters. The map is a substitute: `x -> t1^r`,
    /// `y -> t2^r` with `r` extending `C(v t1)`.
    FreeAbelianSubstitute,
    /// Form II: a centralizer extension of the given rank.
    CentralizerExt {
        rank: usize,
    },
    /// A coefficient that is trivial in the group below was erased.
    ErasedCoefficient,
    /// The constant is trivial and the rightmost coefficient took its place.
    ConstantAbsorbed,
    /// Nothing left after erasing.
    Trivial,
    Square,
    SquareConstant,
    TwoSquares,
    ConjugateConstant,
    GenusZero {
        k: usize,
    },
    CommutativeSquares {
        p: usize,
        k: usize,
    },
    TwoSquaresConstant,
    SquareConjugate,
    SquarePinned,
    ThreeSquaresGeneralPosition,
    ThreeSquaresCommutative,
    Commutator,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::Free { letters } => write!(f, "form IV ({letters} free letters)"),
            Case::FreeAbelianSubstitute => {
                write!(f, "form III (substitute map x -> t1^r, y -> t2^r)")
            }
            Case::CentralizerExt { rank } => write!(f, "form II (rank {rank})"),
            Case::ErasedCoefficient => write!(f, "trivial coefficient erased"),
            Case::ConstantAbsorbed => write!(f, "trivial constant absorbed"),
            Case::Trivial => write!(f, "trivial equation"),
            Case::Square => write!(f, "x^2"),
            Case::SquareConstant => write!(f, "x^2 d"),
            Case::TwoSquares => write!(f, "x^2 y^2"),
            Case::ConjugateConstant => write!(f, "c^z d"),
            Case::GenusZero { k } => write!(f, "genus zero, {k} coefficients, commutative"),
            Case::CommutativeSquares { p, k } => {
                write!(f, "{p} squares, {k} coefficients, commutative")
            }
            Case::TwoSquaresConstant => write!(f, "x^2 y^2 d, non-commutative"),
            Case::SquareConjugate => write!(f, "x^2 c^z d, non-commutative"),
            Case::SquarePinned => write!(f, "x^2 c^z d, commutative (x pinned)"),
            Case::ThreeSquaresGeneralPosition => write!(f, "x^2 y^2 z^2, general position"),
            Case::ThreeSquaresCommutative => write!(f, "x^2 y^2 z^2, commutative"),
            Case::Commutator => write!(f, "[x,y]"),
        }
    }
}

/// Search radii used by the embedding constructions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbedConfig {
    /// Radius of the ball searched for solutions of quadratic equations.
    pub solution_radius: usize,
    /// Radius of the ball searched for a non-commuting pair.
    pub pair_radius: usize,
    /// Injectivity sampling radius for pipeline results, if any.
    pub verify_radius: Option<usize>,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            solution_radius: 2,
            pair_radius: 2,
            verify_radius: None,
        }
    }
}

/// The tower built for one level and the map from the level's group.
#[derive(Clone, Debug)]
pub struct LevelEmbedding {
    pub tower: Tower,
    pub hom: GroupHom,
    pub trace: Vec<Case>,
}

#[derive(Clone, Debug)]
pub struct EmbeddingResult {
    pub tower: Arc<Tower>,
    /// From the coordinate presentation of the system into `tower`.
    pub hom: GroupHom,
    /// Cases per level, innermost level first.
    pub case_trace: Vec<Vec<Case>>,
}

struct Builder<'a> {
    tower: Tower,
    reserved: &'a BTreeSet<Symbol>,
    cfg: &'a EmbedConfig,
    trace: Vec<Case>,
}

fn prod(parts: &[&Word]) -> Word {
    Word::product(parts.iter().copied())
}

impl Builder<'_> {
    fn fresh(&self, n: usize) -> Vec<Symbol> {
        let gens = self.tower.generators();
        (1..)
            .map(|i| Symbol::new(&format!("t{i}")))
            .filter(|s| !gens.contains(s) && !self.reserved.contains(s))
            .take(n)
            .collect()
    }

    fn extend(&mut self, u: &Word, letters: &[Symbol]) -> Result<()> {
        self.tower = self
            .tower
            .extend_centralizer(u, letters.len(), Some(letters))?;
        Ok(())
    }

    fn extend_one(&mut self, u: &Word) -> Result<Word> {
        let t = self.fresh(1);
        self.extend(u, &t)?;
        Ok(Word::symbol(&t[0]))
    }

    fn trivial(&self, w: &Word) -> Result<bool> {
        self.tower.wp(w)
    }

    /// The shortlex-first pair of non-commuting elements.
    fn noncommuting_pair(&self) -> Result<(Word, Word)> {
        let elems: Vec<Word> = ball(&self.tower.generators(), self.cfg.pair_radius)
            .into_iter()
            .skip(1)
            .collect();
        for (i, u) in elems.iter().enumerate() {
            for v in &elems[i + 1..] {
                if !self.tower.commute(u, v)? {
                    return Ok((u.clone(), v.clone()));
                }
            }
        }
        Err(Error::BoundExhausted(format!(
            "no non-commuting pair in `{}` within radius {}",
            self.tower.name(),
            self.cfg.pair_radius
        )))
    }

    fn free(&mut self, vars: &[Symbol]) -> Result<Assignment> {
        let mut out = Assignment::new();
        if vars.is_empty() {
            return Ok(out);
        }
        for pair in vars.chunks(2) {
            let (u, v) = self.noncommuting_pair()?;
            let t = self.extend_one(&u)?;
            let s = self.extend_one(&v)?;
            let r = self.extend_one(&prod(&[&u, &s, &t]))?;
            out.insert(pair[0].clone(), t.conjugate(&r));
            if let Some(y) = pair.get(1) {
                out.insert(y.clone(), s.conjugate(&r));
            }
        }
        self.trace.push(Case::Free {
            letters: vars.len(),
        });
        Ok(out)
    }

    fn free_abelian(&mut self, vars: &[Symbol]) -> Result<Assignment> {
        if vars.len() < 2 {
            return self.free(vars);
        }
        let (u, v) = self.noncommuting_pair()?;
        let ts = self.fresh(2);
        self.extend(&u, &ts)?;
        let t1 = Word::symbol(&ts[0]);
        let r = self.extend_one(&v.mul(&t1))?;
        let mut out = Assignment::new();
        out.insert(vars[0].clone(), t1.conjugate(&r));
        out.insert(vars[1].clone(), Word::symbol(&ts[1]).conjugate(&r));
        self.trace.push(Case::FreeAbelianSubstitute);
        if vars.len() > 2 {
            let center = out[&vars[0]].clone();
            out.extend(self.centralizer_ext(&center, &vars[2..])?);
        }
        Ok(out)
    }

    fn centralizer_ext(&mut self, u: &Word, vars: &[Symbol]) -> Result<Assignment> {
        if self.trivial(u)? {
            return self.free_abelian(vars);
        }
        let gens = self.tower.generators();
        let mut names: Vec<Symbol> = Vec::new();
        for v in vars {
            if gens.contains(v) {
                let fresh = self.fresh(names.len() + 1);
                names.push(fresh.into_iter().find(|s| !names.contains(s)).unwrap());
            } else {
                names.push(v.clone());
            }
        }
        self.extend(u, &names)?;
        self.trace.push(Case::CentralizerExt { rank: vars.len() });
        Ok(vars
            .iter()
            .cloned()
            .zip(names.iter().map(Word::symbol))
            .collect())
    }

    fn search_system(&self, vars: Vec<Symbol>, equation: Word) -> Result<EqSystem> {
        let pres = Arc::new(self.tower.total_presentation()?);
        EqSystem::new("level", pres, vars, vec![equation])
    }

    /// Any solution, searching balls of growing radius.
    fn solve(&self, q: &StandardQuadratic) -> Result<Assignment> {
        let sys = self.search_system(q.variables(), q.word())?;
        for r in 0..=self.cfg.solution_radius {
            if let Some(phi) = sys.hom_search(&self.tower, r, Some(1))?.pop() {
                return Ok(phi);
            }
        }
        Err(Error::NoSolutionWithinBound(format!(
            "`{q}` within radius {}",
            self.cfg.solution_radius
        )))
    }

    /// Prefers a witness in general position; falls back to any
    /// non-commutative one.
    fn general_position(&self, q: &StandardQuadratic) -> Result<GeneralPosition> {
        let pres = Arc::new(self.tower.total_presentation()?);
        let mut fallback = None;
        let mut last = GeneralPosition::AllCommutativeUpToBound {
            solutions_checked: 0,
        };
        for r in 0..=self.cfg.solution_radius {
            match detect_general_position(q, pres.clone(), &self.tower, r)? {
                g @ GeneralPosition::Found {
                    in_general_position: true,
                    ..
                } => return Ok(g),
                g @ GeneralPosition::Found { .. } => {
                    fallback.get_or_insert(g);
                }
                g => last = g,
            }
        }
        Ok(fallback.unwrap_or(last))
    }

    /// Images for the variables of `q` (including its free variables).
    fn quadratic(&mut self, q: &StandardQuadratic) -> Result<Assignment> {
        let mut freed = q.free_variables.clone();
        let mut atoms = Vec::new();
        for a in &q.atoms {
            if let Atom::Conjugate(z, c) = a {
                if self.trivial(c)? {
                    freed.push(z.clone());
                    self.trace.push(Case::ErasedCoefficient);
                    continue;
                }
            }
            atoms.push(a.clone());
        }
        let mut d = q.d.clone();
        if !d.is_empty() && self.trivial(&d)? {
            d = Word::empty();
        }
        // old variable -> word in the variables of the reduced equation
        let mut sigma = Assignment::new();
        if d.is_empty() {
            if let Some(k) = atoms.iter().rposition(|a| matches!(a, Atom::Conjugate(..))) {
                let Atom::Conjugate(z, c) = atoms.remove(k) else {
                    unreachable!()
                };
                let zw = Word::symbol(&z);
                for a in &atoms {
                    match a {
                        Atom::Conjugate(u, _) => {
                            sigma.insert(u.clone(), Word::symbol(u).mul(&zw));
                        }
                        _ => {
                            for v in a.variables() {
                                sigma.insert(v.clone(), Word::symbol(&v).conjugate(&zw));
                            }
                        }
                    }
                }
                d = c;
                freed.push(z);
                self.trace.push(Case::ConstantAbsorbed);
            }
        }
        let reduced = StandardQuadratic {
            atoms,
            d,
            free_variables: Vec::new(),
        };
        let mut img = self.free(&freed)?;
        img.extend(self.dispatch(&reduced)?);
        let mut out = Assignment::new();
        for v in q
            .variables()
            .into_iter()
            .chain(q.free_variables.iter().cloned())
        {
            let w = sigma.get(&v).cloned().unwrap_or_else(|| Word::symbol(&v));
            out.insert(v, w.substitute_map(&img));
        }
        Ok(out)
    }

    fn dispatch(&mut self, q: &StandardQuadratic) -> Result<Assignment> {
        let k = q.m();
        let genus = q.genus();
        let names: Vec<Symbol> = q
            .atoms
            .iter()
            .filter(|a| !matches!(a, Atom::Conjugate(..)))
            .map(|a| a.variables()[0].clone())
            .collect();
        if genus == 0 {
            return match k {
                0 if q.d.is_empty() => {
                    self.trace.push(Case::Trivial);
                    Ok(Assignment::new())
                }
                0 => Err(Error::Invalid(format!(
                    "the constant `{}` is nontrivial, so the equation has no solution",
                    q.d
                ))),
                1 => self.conjugate_constant(q),
                _ => self.genus_zero(q),
            };
        }
        if q.orientable() {
            if genus == 1 && k == 0 && q.d.is_empty() {
                let Atom::Commutator(x, y) = &q.atoms[0] else {
                    unreachable!()
                };
                self.trace.push(Case::Commutator);
                return self.free_abelian(&[x.clone(), y.clone()]);
            }
            return Err(Error::UnsupportedCase(format!("`{q}`: {REGULAR}")));
        }
        let p = genus;
        if p == 1 && k == 0 {
            let x = &names[0];
            if q.d.is_empty() {
                self.trace.push(Case::Square);
                return Ok(Assignment::from([(x.clone(), Word::empty())]));
            }
            let phi = self.solve(q)?;
            self.trace.push(Case::SquareConstant);
            return Ok(Assignment::from([(x.clone(), phi[x].clone())]));
        }
        if p == 1 {
            return match self.general_position(q)? {
                GeneralPosition::Found { witness, .. } if k == 1 => {
                    self.square_conjugate(q, &witness)
                }
                GeneralPosition::Found { .. } => {
                    Err(Error::UnsupportedCase(format!("`{q}`: {REGULAR}")))
                }
                GeneralPosition::AllCommutativeUpToBound { .. } => self.square_pinned(q),
            };
        }
        if p == 2 && k == 0 && q.d.is_empty() {
            let f = self.free(&names[..1])?;
            self.trace.push(Case::TwoSquares);
            let fx = f[&names[0]].clone();
            return Ok(Assignment::from([
                (names[0].clone(), fx.clone()),
                (names[1].clone(), fx.inverse()),
            ]));
        }
        if p >= 4 && k == 0 && q.d.is_empty() {
            return Err(Error::UnsupportedCase(format!("`{q}`: {REGULAR}")));
        }
        if p == 3 && k == 0 && q.d.is_empty() {
            return match self.general_position(q)? {
                GeneralPosition::Found { witness, in_general_position: true } => self.three_squares(&names, &witness),
                GeneralPosition::Found { .. } => Err(Error::NoSolutionWithinBound(format!(
                    "`{q}` has non-commutative solutions but none in general position within radius {}",
                    self.cfg.solution_radius
                ))),
                GeneralPosition::AllCommutativeUpToBound { .. } => {
                    let ab = self.free_abelian(&names[..2])?;
                    let (x, y) = (ab[&names[0]].clone(), ab[&names[1]].clone());
                    self.trace.push(Case::ThreeSquaresCommutative);
                    let mut out = ab;
                    out.insert(names[2].clone(), x.mul(&y).inverse());
                    Ok(out)
                }
            };
        }
        match self.general_position(q)? {
            GeneralPosition::Found { witness, .. } if p == 2 && k == 0 => {
                self.two_squares_constant(q, &names, &witness)
            }
            GeneralPosition::Found { .. } => {
                Err(Error::UnsupportedCase(format!("`{q}`: {REGULAR}")))
            }
            GeneralPosition::AllCommutativeUpToBound { .. } => self.commutative_squares(q, &names),
        }
    }

    fn conjugates(q: &StandardQuadratic) -> Vec<(Symbol, Word)> {
        q.atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Conjugate(z, c) => Some((z.clone(), c.clone())),
                _ => None,
            })
            .collect()
    }

    /// `c^z d`: `z -> t a` with `t` extending `C(c)` and `a` any solution.
    fn conjugate_constant(&mut self, q: &StandardQuadratic) -> Result<Assignment> {
        let (z, c) = Self::conjugates(q).remove(0);
        let a = self.solve(q)?[&z].clone();
        let t = self.extend_one(&c)?;
        self.trace.push(Case::ConjugateConstant);
        Ok(Assignment::from([(z, t.mul(&a))]))
    }

    /// `c_1^{z_1} ... c_k^{z_k} d` with only commutative solutions:
    /// `z_i -> a_i t_i` with the `t_i` extending `C(c_1^{a_1})`.
    fn genus_zero(&mut self, q: &StandardQuadratic) -> Result<Assignment> {
        let k = q.m();
        if let GeneralPosition::Found { .. } = self.general_position(q)? {
            if k >= 3 {
                return Err(Error::UnsupportedCase(format!("`{q}`: {REGULAR}")));
            }
            return Err(Error::UnsupportedCase(format!(
                "`{q}` has a non-commutative solution; no explicit embedding is available for this genus-zero case"
            )));
        }
        let phi = self.solve(q)?;
        let conj = Self::conjugates(q);
        let witness = conj[0].1.conjugate(&phi[&conj[0].0]);
        let ts = self.fresh(k);
        self.extend(&witness, &ts)?;
        self.trace.push(Case::GenusZero { k });
        Ok(conj
            .iter()
            .zip(&ts)
            .map(|((z, _), t)| (z.clone(), phi[z].mul(&Word::symbol(t))))
            .collect())
    }

    /// `x_1^2 ... x_p^2 c_1^{z_1} ... c_k^{z_k} d`, `p >= 2`, only commutative
    /// solutions: a rank `p+k-1` extension of the common centralizer.
    fn commutative_squares(
        &mut self,
        q: &StandardQuadratic,
        names: &[Symbol],
    ) -> Result<Assignment> {
        let (p, k) = (names.len(), q.m());
        let phi = self.solve(q)?;
        let conj = Self::conjugates(q);
        let mut candidates: Vec<Word> = conj.iter().map(|(z, c)| c.conjugate(&phi[z])).collect();
        candidates.push(Word::product(names.iter().map(|x| &phi[x])));
        let mut witness = None;
        for w in candidates {
            if !self.trivial(&w)? {
                witness = Some(w);
                break;
            }
        }
        let witness = witness
            .ok_or_else(|| Error::Invalid(format!("`{q}`: every coefficient image is trivial")))?;
        let ts: Vec<Word> = {
            let names = self.fresh(p + k - 1);
            self.extend(&witness, &names)?;
            names.iter().map(Word::symbol).collect()
        };
        let mut out = Assignment::new();
        for (j, (z, _)) in conj.iter().enumerate() {
            out.insert(z.clone(), phi[z].mul(&ts[j]));
        }
        let mut rest = Word::empty();
        for (i, x) in names[..p - 1].iter().enumerate() {
            out.insert(x.clone(), phi[x].mul(&ts[k + i]));
            rest = rest.mul(&ts[k + i].inverse());
        }
        out.insert(names[p - 1].clone(), phi[&names[p - 1]].mul(&rest));
        self.trace.push(Case::CommutativeSquares { p, k });
        Ok(out)
    }

    /// `x^2 c_1^{z_1} ... d` with only commutative solutions: every solution
    /// sends `x` to the same `a`, leaving a genus-zero equation.
    fn square_pinned(&mut self, q: &StandardQuadratic) -> Result<Assignment> {
        let phi = self.solve(q)?;
        let Atom::Square(x) = &q.atoms[0] else {
            unreachable!()
        };
        let a = phi[x].clone();
        let rest = StandardQuadratic {
            atoms: q.atoms[1..].to_vec(),
            d: q.d.mul(&a.pow(2)),
            free_variables: Vec::new(),
        };
        self.trace.push(Case::SquarePinned);
        let mut out = self.quadratic(&rest)?;
        out.insert(x.clone(), a);
        Ok(out)
    }

    /// `x^2 c^z d` with a non-commutative solution `x -> a`, `z -> b`.
    fn square_conjugate(&mut self, q: &StandardQuadratic, phi: &Assignment) -> Result<Assignment> {
        let Atom::Square(x) = &q.atoms[0] else {
            unreachable!()
        };
        let (z, c) = Self::conjugates(q).remove(0);
        let (a, b) = (phi[x].clone(), phi[&z].clone());
        let t = self.extend_one(&q.d)?;
        let s = self.extend_one(&c.conjugate(&b))?;
        let r = self.extend_one(&c.conjugate(&b.mul(&t)))?;
        self.trace.push(Case::SquareConjugate);
        Ok(Assignment::from([
            (x.clone(), a.conjugate(&t)),
            (z, prod(&[&b, &s, &t, &r])),
        ]))
    }

    /// `x^2 y^2 d` with a non-commutative solution `x -> a`, `y -> b`.
    fn two_squares_constant(
        &mut self,
        _q: &StandardQuadratic,
        names: &[Symbol],
        phi: &Assignment,
    ) -> Result<Assignment> {
        let (a, b) = (phi[&names[0]].clone(), phi[&names[1]].clone());
        let t = self.extend_one(&a.mul(&b))?;
        let at = a.mul(&t);
        let s = self.extend_one(&at.mul(&at))?;
        let r = self.extend_one(&prod(&[&s.inverse(), &at, &s, &t.inverse(), &b]))?;
        self.trace.push(Case::TwoSquaresConstant);
        Ok(Assignment::from([
            (names[0].clone(), at.conjugate(&s).mul(&r)),
            (names[1].clone(), prod(&[&r.inverse(), &t.inverse(), &b])),
        ]))
    }

    /// `x^2 y^2 z^2` with a solution `a, b, c` in general position: six
    /// extensions.
    fn three_squares(&mut self, names: &[Symbol], phi: &Assignment) -> Result<Assignment> {
        let (a, b, c) = (
            phi[&names[0]].clone(),
            phi[&names[1]].clone(),
            phi[&names[2]].clone(),
        );
        let s = self.extend_one(&a.mul(&b))?;
        let si = s.inverse();
        let r = self.extend_one(&prod(&[&si, &b, &c]))?;
        let v = self.extend_one(&prod(&[&a, &b, &r, &si, &b, &c]))?;
        let vas = prod(&[&v, &a, &s]);
        let sbr = prod(&[&si, &b, &r]);
        let rcv = prod(&[&r.inverse(), &c, &v.inverse()]);
        let t = self.extend_one(&vas.mul(&vas))?;
        let u = self.extend_one(&sbr.mul(&sbr))?;
        let w = self.extend_one(&rcv.mul(&rcv))?;
        self.trace.push(Case::ThreeSquaresGeneralPosition);
        Ok(Assignment::from([
            (names[0].clone(), vas.conjugate(&t)),
            (names[1].clone(), sbr.conjugate(&u)),
            (names[2].clone(), rcv.conjugate(&w)),
        ]))
    }
}

fn identity_on(gens: &[Symbol]) -> Assignment {
    gens.iter().map(|g| (g.clone(), Word::symbol(g))).collect()
}

/// Embeds a standard quadratic equation over `current`. Returns the new
/// tower, images of the equation's variables and the cases used.
pub fn embed_quadratic(
    current: &Tower,
    q: &StandardQuadratic,
    cfg: &EmbedConfig,
) -> Result<(Tower, Assignment, Vec<Case>)> {
    let alpha = current.alphabet();
    for v in q.variables().iter().chain(&q.free_variables) {
        if alpha.contains(v) {
            return Err(Error::Invalid(format!(
                "variable `{v}` clashes with a generator"
            )));
        }
    }
    for c in q.coefficients().iter().chain([&q.d]) {
        alpha.check(c)?;
    }
    let reserved: BTreeSet<Symbol> = q
        .variables()
        .into_iter()
        .chain(q.free_variables.iter().cloned())
        .collect();
    let mut b = Builder {
        tower: current.clone(),
        reserved: &reserved,
        cfg,
        trace: Vec::new(),
    };
    let images = b.quadratic(q)?;
    Ok((b.tower, images, b.trace))
}

fn level_images(b: &mut Builder, level: &NtqLevel, vars: &[Symbol]) -> Result<Assignment> {
    match level {
        NtqLevel::Free { vars } => b.free(vars),
        NtqLevel::FreeAbelian { vars } => b.free_abelian(vars),
        NtqLevel::CentralizerExt { center_of, vars } => b.centralizer_ext(center_of, vars),
        NtqLevel::Quadratic { equation } => {
            let is_var = |s: &Symbol| vars.contains(s);
            let n = to_standard_form(equation, is_var)?;
            let img = b.quadratic(&n.standard)?;
            Ok(vars
                .iter()
                .map(|v| (v.clone(), n.automorphism[v].substitute_map(&img)))
                .collect())
        }
    }
}

/// The group of a level over `current`, as a tower when it is one.
fn level_source(current: &Tower, level: &NtqLevel, vars: &[Symbol]) -> Result<SourceGroup> {
    let name = format!("{}_level", current.name());
    Ok(match level {
        NtqLevel::Free { .. } => {
            SourceGroup::Tower(Arc::new(current.with_free_generators(vars)?.renamed(&name)))
        }
        NtqLevel::FreeAbelian { .. } => {
            SourceGroup::Tower(Arc::new(abelian_source(current, vars)?.renamed(&name)))
        }
        NtqLevel::CentralizerExt { center_of, .. } => {
            let t = if current.wp(center_of)? {
                abelian_source(current, vars)?
            } else {
                current.extend_centralizer(center_of, vars.len(), Some(vars))?
            };
            SourceGroup::Tower(Arc::new(t.renamed(&name)))
        }
        NtqLevel::Quadratic { .. } => {
            let mut gens = current.generators();
            gens.extend(vars.iter().cloned());
            let mut rels = current.relators();
            rels.extend(level.relators(vars));
            SourceGroup::Presentation(Arc::new(Presentation::new(&name, gens, rels)?))
        }
    })
}

fn abelian_source(current: &Tower, vars: &[Symbol]) -> Result<Tower> {
    let t = current.with_free_generators(&vars[..1])?;
    if vars.len() == 1 {
        return Ok(t);
    }
    t.extend_centralizer(&Word::symbol(&vars[0]), vars.len() - 1, Some(&vars[1..]))
}

fn embed_level_reserved(
    current: &Tower,
    level: &NtqLevel,
    reserved: &BTreeSet<Symbol>,
    cfg: &EmbedConfig,
) -> Result<LevelEmbedding> {
    let vars = level.variables(&current.alphabet());
    if let NtqLevel::CentralizerExt { center_of, .. } = level {
        current.alphabet().check(center_of)?;
    }
    let mut b = Builder {
        tower: current.clone(),
        reserved,
        cfg,
        trace: Vec::new(),
    };
    let mut images = level_images(&mut b, level, &vars)?;
    images.extend(identity_on(&current.generators()));
    let source = level_source(current, level, &vars)?;
    let mut hom = GroupHom::new(source, Arc::new(b.tower.clone()), images)?;
    hom.verify()?;
    Ok(LevelEmbedding {
        tower: b.tower,
        hom,
        trace: b.trace,
    })
}

/// Embeds the group of one level over `current` into an extension of it.
/// Constants of the level must be words over `current`'s generators.
pub fn embed_level(current: &Tower, level: &NtqLevel, cfg: &EmbedConfig) -> Result<LevelEmbedding> {
    let reserved: BTreeSet<Symbol> = level.variables(&current.alphabet()).into_iter().collect();
    embed_level_reserved(current, level, &reserved, cfg)
}

/// Folds [`embed_level`] over the levels, innermost first, and checks the
/// composed map on the coordinate presentation.
pub fn embed_ntq(
    system: &NtqSystem,
    search_bound: usize,
    cfg: &EmbedConfig,
) -> Result<EmbeddingResult> {
    let reserved: BTreeSet<Symbol> = system.variables().into_iter().collect();
    let mut tower = Tower::new(&format!("H_{}", system.name), system.base.clone())
        .with_search_bound(search_bound);
    let mut images = identity_on(Presentation::generators(&system.base));
    let mut trace = Vec::new();
    for i in (0..system.levels.len()).rev() {
        let level = system.levels[i].substitute(&images);
        let vars = system.level_variables(i);
        let step = embed_level_reserved(&tower, &level, &reserved, cfg)?;
        for v in vars {
            images.insert(v.clone(), step.hom.images[&v].clone());
        }
        tower = step.tower;
        trace.push(step.trace);
    }
    let tower = Arc::new(tower);
    let source = SourceGroup::Presentation(Arc::new(system.coordinate_presentation()?));
    let mut hom = GroupHom::new(source, tower.clone(), images)?;
    hom.verify()?;
    Ok(EmbeddingResult {
        tower,
        hom,
        case_trace: trace,
    })
}

/// One NTQ system with the map `rho` from the input group's generators to
/// words over the system's coordinate group.
#[derive(Clone, Debug)]
pub struct PipelineInput {
    pub system: NtqSystem,
    pub rho: Assignment,
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub embedding: EmbeddingResult,
    /// The composite from the input group into the tower.
    pub phi: GroupHom,
    pub injectivity: Option<Injectivity>,
}

/// Runs every input independently: embed the system, compose with `rho`,
/// verify the relators of `g`, and sample injectivity when `g` has a
/// decidable word problem and a radius is configured.
pub fn run_pipeline(
    g: &Arc<Presentation>,
    inputs: &[PipelineInput],
    search_bound: usize,
    cfg: &EmbedConfig,
) -> Vec<Result<PipelineResult>> {
    inputs
        .par_iter()
        .map(|input| {
            let embedding = embed_ntq(&input.system, search_bound, cfg)?;
            let mut images = Assignment::new();
            for gen in Presentation::generators(g) {
                let w = input
                    .rho
                    .get(gen)
                    .ok_or_else(|| Error::Invalid(format!("rho has no image for `{gen}`")))?;
                images.insert(gen.clone(), embedding.hom.apply(w));
            }
            let mut phi = GroupHom::new(
                SourceGroup::Presentation(g.clone()),
                embedding.tower.clone(),
                images,
            )?;
            phi.verify()?;
            let injectivity = match cfg.verify_radius {
                Some(r) if g.has_decidable_wp() => Some(phi.injectivity_sample(r)?),
                _ => None,
            };
            debug_assert!(phi.status != HomStatus::Unverified);
            Ok(PipelineResult {
                embedding,
                phi,
                injectivity,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::symbols;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn f2() -> Tower {
        Tower::new(
            "F2",
            Arc::new(Presentation::free("F2", symbols(&["a", "b"])).unwrap()),
        )
    }

    fn level(cur: &Tower, l: NtqLevel) -> LevelEmbedding {
        embed_level(cur, &l, &EmbedConfig::default()).unwrap()
    }

    fn quad(eq: &str) -> NtqLevel {
        NtqLevel::Quadratic { equation: w(eq) }
    }

    #[test]
    fn form_iv_uses_a_and_b() {
        let e = level(
            &f2(),
            NtqLevel::Free {
                vars: symbols(&["x", "y"]),
            },
        );
        let lv = e.tower.levels();
        assert_eq!(lv.len(), 3);
        assert_eq!(lv[0].center_witness, w("a"));
        assert_eq!(lv[1].center_witness, w("b"));
        assert_eq!(lv[2].center_witness, w("a t2 t1"));
        assert_eq!(e.hom.images[&Symbol::new("x")], w("t3^-1 t1 t3"));
        assert_eq!(e.hom.status, HomStatus::RelatorsVerified);
    }

    #[test]
    fn form_ii_names_letters_after_variables() {
        let e = level(
            &f2(),
            NtqLevel::CentralizerExt {
                center_of: w("a"),
                vars: symbols(&["x"]),
            },
        );
        assert_eq!(e.tower.stable_letters(), symbols(&["x"]));
        assert_eq!(e.hom.images[&Symbol::new("x")], w("x"));
    }

    #[test]
    fn form_iii_commutes() {
        let mut e = level(
            &f2(),
            NtqLevel::FreeAbelian {
                vars: symbols(&["x", "y", "z"]),
            },
        );
        assert!(matches!(
            e.hom.injectivity_sample(2).unwrap(),
            Injectivity::Pass { .. }
        ));
    }

    #[test]
    fn square_killed() {
        let e = level(&f2(), quad("x x"));
        assert_eq!(e.tower.height(), 0);
        assert_eq!(e.hom.images[&Symbol::new("x")], Word::empty());
    }

    #[test]
    fn square_with_constant() {
        let e = level(&f2(), quad("x x a^-2"));
        assert_eq!(e.hom.images[&Symbol::new("x")], w("a"));
        assert_eq!(e.trace, vec![Case::SquareConstant]);
    }

    #[test]
    fn two_squares() {
        let e = level(&f2(), quad("x x y y"));
        let x = &e.hom.images[&Symbol::new("x")];
        assert_eq!(e.hom.images[&Symbol::new("y")], x.inverse());
    }

    #[test]
    fn conjugate_constant() {
        let e = level(&f2(), quad("z^-1 a z a^-1"));
        assert_eq!(e.trace, vec![Case::ConjugateConstant]);
        assert_eq!(e.tower.height(), 1);
        assert_eq!(e.tower.levels()[0].center_witness, w("a"));
    }

    #[test]
    fn two_squares_with_constant_noncommutative() {
        let e = level(&f2(), quad("x x y y b^-2 a^-2"));
        assert_eq!(e.trace, vec![Case::TwoSquaresConstant]);
        let t = &e.tower;
        let x = &e.hom.images[&Symbol::new("x")];
        let y = &e.hom.images[&Symbol::new("y")];
        let img = Word::product([x, x, y, y, &w("b^-2 a^-2")]);
        assert_eq!(t.britton_reduce(&img).unwrap(), Word::empty());
    }

    #[test]
    fn square_conjugate_both_ways() {
        let e = level(&f2(), quad("x x z^-1 a z b^-1 a^-1 b a^-2"));
        assert_eq!(e.trace, vec![Case::SquareConjugate]);
        let e = level(&f2(), quad("x x z^-1 a z a^-3"));
        assert!(e.trace.contains(&Case::SquarePinned));
    }

    #[test]
    fn regular_cases_are_refused() {
        for eq in ["[x,y] a", "[x,y][p,q]"] {
            let err = embed_level(&f2(), &quad(eq), &EmbedConfig::default()).unwrap_err();
            assert!(
                matches!(err, Error::UnsupportedCase(ref m) if m.contains("Theorem 4.1")),
                "{eq}: {err}"
            );
        }
    }

    #[test]
    fn ntq_two_levels() {
        let base = Arc::new(Presentation::free("F2", symbols(&["a", "b"])).unwrap());
        let levels = vec![
            NtqLevel::CentralizerExt {
                center_of: w("x"),
                vars: symbols(&["y"]),
            },
            NtqLevel::Free {
                vars: symbols(&["x"]),
            },
        ];
        let sys = NtqSystem::new("two", base, levels).unwrap();
        assert_eq!(sys.variables(), symbols(&["x", "y"]));
        let r = embed_ntq(&sys, 2, &EmbedConfig::default()).unwrap();
        assert_eq!(r.hom.status, HomStatus::RelatorsVerified);
        assert_eq!(r.case_trace.len(), 2);
    }
}
