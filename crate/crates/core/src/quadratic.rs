//! Quadratic words: shape detection, reduction to standard form by explicit
//! automorphisms, Euler characteristic, and classification of solutions.

use std::collections::BTreeMap;
use std::fmt;

use crate::equations::{Assignment, EqSystem};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::word::{Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quadraticity {
    Not,
    Quadratic,
    Strict,
}

/// Counts occurrences (either sign) of every variable across `words`.
pub fn quadraticity<F: Fn(&Symbol) -> bool>(words: &[Word], is_var: F) -> Quadraticity {
    let mut counts: BTreeMap<Symbol, usize> = BTreeMap::new();
    for w in words {
        for l in w.letters() {
            if is_var(&l.symbol) {
                *counts.entry(l.symbol.clone()).or_insert(0) += 1;
            }
        }
    }
    if counts.values().any(|&c| c > 2) {
        Quadraticity::Not
    } else if counts.values().all(|&c| c == 2) {
        Quadraticity::Strict
    } else {
        Quadraticity::Quadratic
    }
}

pub fn is_quadratic(s: &EqSystem) -> Quadraticity {
    quadraticity(&s.equations, |x| s.is_variable(x))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Commutator(Symbol, Symbol),
    Square(Symbol),
    /// `z^-1 c z`
    Conjugate(Symbol, Word),
}

impl Atom {
    pub fn word(&self) -> Word {
        match self {
            Atom::Commutator(x, y) => Word::commutator(&Word::symbol(x), &Word::symbol(y)),
            Atom::Square(x) => Word::symbol(x).pow(2),
            Atom::Conjugate(z, c) => c.conjugate(&Word::symbol(z)),
        }
    }

    pub fn variables(&self) -> Vec<Symbol> {
        match self {
            Atom::Commutator(x, y) => vec![x.clone(), y.clone()],
            Atom::Square(x) | Atom::Conjugate(x, _) => vec![x.clone()],
        }
    }

    pub fn weight(&self) -> i64 {
        match self {
            Atom::Commutator(..) => -2,
            _ => -1,
        }
    }
}

/// The four standard shapes: closed or punctured, orientable or not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    ClosedOrientable,
    PuncturedOrientable,
    ClosedNonOrientable,
    PuncturedNonOrientable,
}

/// `r_1 ... r_k d` with commutator or square atoms first, then conjugate
/// atoms, then the constant `d` (empty when absent).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardQuadratic {
    pub atoms: Vec<Atom>,
    pub d: Word,
    /// Variables of the original word that the normalizing automorphism
    /// removed from the equation; they are unconstrained.
    pub free_variables: Vec<Symbol>,
}

impl StandardQuadratic {
    /// `prod [x_i,y_i]` (orientable) or `prod x_i^2`, then `z_j^-1 c_j z_j`,
    /// then `d`, with variables named `x1, y1, ...`, `z1, ...`.
    pub fn build(orientable: bool, genus: usize, coefficients: &[Word], d: Word) -> Self {
        let mut atoms = Vec::new();
        for i in 1..=genus {
            let x = Symbol::new(&format!("x{i}"));
            if orientable {
                atoms.push(Atom::Commutator(x, Symbol::new(&format!("y{i}"))));
            } else {
                atoms.push(Atom::Square(x));
            }
        }
        for (j, c) in coefficients.iter().enumerate() {
            atoms.push(Atom::Conjugate(
                Symbol::new(&format!("z{}", j + 1)),
                c.clone(),
            ));
        }
        StandardQuadratic {
            atoms,
            d,
            free_variables: Vec::new(),
        }
    }

    pub fn word(&self) -> Word {
        let parts: Vec<Word> = self
            .atoms
            .iter()
            .map(Atom::word)
            .chain([self.d.clone()])
            .collect();
        Word::product(parts.iter())
    }

    pub fn atom_words(&self) -> Vec<Word> {
        self.atoms.iter().map(Atom::word).collect()
    }

    pub fn orientable(&self) -> bool {
        !self.atoms.iter().any(|a| matches!(a, Atom::Square(_)))
    }

    /// Number of commutators (orientable) or squares (non-orientable).
    pub fn genus(&self) -> usize {
        self.atoms
            .iter()
            .filter(|a| !matches!(a, Atom::Conjugate(..)))
            .count()
    }

    pub fn coefficients(&self) -> Vec<Word> {
        self.atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Conjugate(_, c) => Some(c.clone()),
                _ => None,
            })
            .collect()
    }

    /// Number of conjugate atoms.
    pub fn m(&self) -> usize {
        self.coefficients().len()
    }

    pub fn punctures(&self) -> usize {
        if self.m() == 0 && self.d.is_empty() {
            0
        } else {
            self.m() + 1
        }
    }

    pub fn shape(&self) -> Shape {
        match (self.orientable(), self.punctures() == 0) {
            (true, true) => Shape::ClosedOrientable,
            (true, false) => Shape::PuncturedOrientable,
            (false, true) => Shape::ClosedNonOrientable,
            (false, false) => Shape::PuncturedNonOrientable,
        }
    }

    pub fn variables(&self) -> Vec<Symbol> {
        self.atoms.iter().flat_map(Atom::variables).collect()
    }

    /// Euler characteristic of the associated punctured surface.
    pub fn euler_char(&self) -> i64 {
        let n = self.genus() as i64;
        let p = self.punctures() as i64;
        if self.orientable() {
            2 - 2 * n - p
        } else {
            2 - n - p
        }
    }

    /// The same number from atom weights: `[x,y]` counts -2, every other atom
    /// and a nontrivial `d` count -1.
    pub fn euler_char_atoms(&self) -> i64 {
        let d = if self.d.is_empty() && self.m() == 0 {
            0
        } else {
            -1
        };
        2 + self.atoms.iter().map(Atom::weight).sum::<i64>() + d
    }
}

impl fmt::Display for StandardQuadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.word())
    }
}

/// Output of [`to_standard_form`]: `w^phi = g^-1 s g` in the free product,
/// where `s` is the standard word and `g` the conjugator.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalization {
    pub standard: StandardQuadratic,
    pub automorphism: Assignment,
    pub conjugator: Word,
}

struct Normalizer<'a, F: Fn(&Symbol) -> bool> {
    is_var: &'a F,
    phi: Assignment,
    atoms: Vec<Atom>,
    rest: Word,
}

impl<F: Fn(&Symbol) -> bool> Normalizer<'_, F> {
    /// Composes `sigma` after the current automorphism; `rest` is rewritten
    /// only when `on_rest` is set.
    fn apply(&mut self, sigma: &Assignment, on_rest: bool) {
        for img in self.phi.values_mut() {
            *img = img.substitute_map(sigma);
        }
        if on_rest {
            self.rest = self.rest.substitute_map(sigma);
        }
    }

    fn sub1(&mut self, x: &Symbol, img: Word) {
        let sigma = Assignment::from([(x.clone(), img)]);
        self.apply(&sigma, true);
    }

    fn positions(&self, x: &Symbol) -> Vec<usize> {
        (0..self.rest.len())
            .filter(|&i| self.rest.letters()[i].symbol == *x)
            .collect()
    }

    fn vars_in_order(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        for l in self.rest.letters() {
            if (self.is_var)(&l.symbol) && !out.contains(&l.symbol) {
                out.push(l.symbol.clone());
            }
        }
        out
    }

    fn slice(&self, a: usize, b: usize) -> Word {
        self.rest.subword(a, b)
    }

    /// `P y Q y R` becomes `y^2 (P Q^-1 R)` via `y -> P^-1 y P Q^-1`.
    fn same_sign_pair(&mut self) -> bool {
        let Some(y) = self.vars_in_order().into_iter().find(|v| {
            let p = self.positions(v);
            self.rest.letters()[p[0]].inverse == self.rest.letters()[p[1]].inverse
        }) else {
            return false;
        };
        if self.rest.letters()[self.positions(&y)[0]].inverse {
            self.sub1(&y, Word::symbol(&y).inverse());
        }
        let p = self.positions(&y);
        let (pre, q) = (self.slice(0, p[0]), self.slice(p[0] + 1, p[1]));
        let post = self.slice(p[1] + 1, self.rest.len());
        let img = Word::product([&pre.inverse(), &Word::symbol(&y), &pre, &q.inverse()]);
        self.sub1(&y, img);
        self.atoms.push(Atom::Square(y));
        self.rest = Word::product([&pre, &q.inverse(), &post]);
        true
    }

    /// `A p B q D p^-1 E q^-1 F` becomes `[p,q] (A E D B F)`.
    fn interleaved_pair(&mut self) -> bool {
        let vars = self.vars_in_order();
        let mut found = None;
        'search: for p in &vars {
            let pp = self.positions(p);
            for q in &vars {
                if q == p {
                    continue;
                }
                let qp = self.positions(q);
                if qp[0] > pp[0] && qp[0] < pp[1] && qp[1] > pp[1] {
                    found = Some((p.clone(), q.clone()));
                    break 'search;
                }
            }
        }
        let Some((p, q)) = found else { return false };
        if self.rest.letters()[self.positions(&p)[0]].inverse {
            self.sub1(&p, Word::symbol(&p).inverse());
        }
        if self.rest.letters()[self.positions(&q)[0]].inverse {
            self.sub1(&q, Word::symbol(&q).inverse());
        }
        let pp = self.positions(&p);
        let qp = self.positions(&q);
        let a = self.slice(0, pp[0]);
        let b = self.slice(pp[0] + 1, qp[0]);
        let d = self.slice(qp[0] + 1, pp[1]);
        let e = self.slice(pp[1] + 1, qp[1]);
        let (pw, qw) = (Word::symbol(&p), Word::symbol(&q));
        self.sub1(&p, pw.conjugate(&a));
        let b1 = a.mul(&b);
        self.sub1(&q, b1.inverse().mul(&qw));
        let d1 = d.mul(&a.inverse());
        self.sub1(&q, qw.mul(&d1.inverse()));
        let e2 = Word::product([&a, &e, &d, &a.inverse()]);
        let sigma = Assignment::from([(p.clone(), pw.mul(&e2)), (q.clone(), qw.conjugate(&e2))]);
        self.apply(&sigma, true);
        let sigma = Assignment::from([(p.clone(), pw.inverse()), (q.clone(), qw.inverse())]);
        self.apply(&sigma, true);
        let head = Word::commutator(&pw, &qw);
        debug_assert_eq!(self.rest.subword(0, 4), head);
        self.rest = self.rest.subword(4, self.rest.len());
        self.atoms.push(Atom::Commutator(p, q));
        true
    }

    /// Innermost `x^-1 B x` with `B` constant, pulled to the front by
    /// `x -> x A`.
    fn nested_pair(&mut self) -> bool {
        let found = self.vars_in_order().into_iter().find(|x| {
            let p = self.positions(x);
            self.rest.letters()[p[0] + 1..p[1]]
                .iter()
                .all(|l| !(self.is_var)(&l.symbol))
        });
        let Some(x) = found else { return false };
        if !self.rest.letters()[self.positions(&x)[0]].inverse {
            self.sub1(&x, Word::symbol(&x).inverse());
        }
        let p = self.positions(&x);
        let a = self.slice(0, p[0]);
        let c = self.slice(p[0] + 1, p[1]);
        let tail = self.slice(p[1] + 1, self.rest.len());
        self.sub1(&x, Word::symbol(&x).mul(&a));
        self.atoms.push(Atom::Conjugate(x, c));
        self.rest = a.mul(&tail);
        true
    }

    /// Moves commutators and squares in front of all conjugate atoms.
    fn reorder(&mut self) {
        let mut u = Word::empty();
        let mut front = Vec::new();
        let mut back = Vec::new();
        for atom in std::mem::take(&mut self.atoms) {
            match &atom {
                Atom::Conjugate(..) => {
                    u = u.mul(&atom.word());
                    back.push(atom);
                }
                _ => {
                    if !u.is_empty() {
                        let sigma: Assignment = atom
                            .variables()
                            .into_iter()
                            .map(|v| (v.clone(), Word::symbol(&v).conjugate(&u)))
                            .collect();
                        self.apply(&sigma, false);
                    }
                    front.push(atom);
                }
            }
        }
        front.extend(back);
        self.atoms = front;
    }

    /// Rewrites every commutator as two squares when squares are present.
    fn unify_nonorientable(&mut self) {
        loop {
            let has_sq = self.atoms.iter().any(|a| matches!(a, Atom::Square(_)));
            let Some(j) = self
                .atoms
                .iter()
                .position(|a| matches!(a, Atom::Commutator(..)))
            else {
                return;
            };
            if !has_sq {
                return;
            }
            // an adjacent (square, commutator) or (commutator, square) pair
            let n = self.atoms.len();
            let pair = (0..n - 1).find(|&i| {
                matches!(
                    (&self.atoms[i], &self.atoms[i + 1]),
                    (Atom::Square(_), Atom::Commutator(..))
                        | (Atom::Commutator(..), Atom::Square(_))
                )
            });
            let i = pair.unwrap_or(j);
            if let (Atom::Commutator(y, z), Atom::Square(x)) =
                (&self.atoms[i].clone(), &self.atoms[i + 1].clone())
            {
                // [y,z] x^2 = x^2 [y,z]^(x^2)
                let x2 = Word::symbol(x).pow(2);
                let sigma = Assignment::from([
                    (y.clone(), Word::symbol(y).conjugate(&x2.inverse())),
                    (z.clone(), Word::symbol(z).conjugate(&x2.inverse())),
                ]);
                self.apply(&sigma, false);
                self.atoms.swap(i, i + 1);
            }
            if let (Atom::Square(x), Atom::Commutator(y, z)) =
                (&self.atoms[i].clone(), &self.atoms[i + 1].clone())
            {
                let (xw, yw, zw) = (Word::symbol(x), Word::symbol(y), Word::symbol(z));
                let sigma = Assignment::from([
                    (x.clone(), Word::product([&yw, &zw, &xw])),
                    (y.clone(), Word::product([&xw.inverse(), &yw, &zw, &xw])),
                    (z.clone(), Word::product([&xw.inverse(), &zw, &xw, &xw])),
                ]);
                self.apply(&sigma, false);
                let new = [
                    Atom::Square(y.clone()),
                    Atom::Square(z.clone()),
                    Atom::Square(x.clone()),
                ];
                self.atoms.splice(i..i + 2, new);
            }
        }
    }
}

/// Brings a strictly quadratic word to standard form by a sequence of
/// elementary automorphisms of the free product with the constants. Ties are
/// broken by first occurrence.
pub fn to_standard_form<F: Fn(&Symbol) -> bool>(w: &Word, is_var: F) -> Result<Normalization> {
    if quadraticity(std::slice::from_ref(w), &is_var) != Quadraticity::Strict {
        return Err(Error::Invalid(format!("`{w}` is not strictly quadratic")));
    }
    let vars: Vec<Symbol> = {
        let mut v: Vec<Symbol> = Vec::new();
        for l in w.letters() {
            if is_var(&l.symbol) && !v.contains(&l.symbol) {
                v.push(l.symbol.clone());
            }
        }
        v
    };
    if vars.is_empty() {
        return Err(Error::Invalid(format!("`{w}` has no variables")));
    }
    let mut n = Normalizer {
        is_var: &is_var,
        phi: vars.iter().map(|v| (v.clone(), Word::symbol(v))).collect(),
        atoms: Vec::new(),
        rest: w.clone(),
    };
    while n.rest.letters().iter().any(|l| is_var(&l.symbol)) {
        if !(n.same_sign_pair() || n.interleaved_pair() || n.nested_pair()) {
            return Err(Error::Invalid(format!(
                "normalization stalled on `{}`",
                n.rest
            )));
        }
    }
    n.reorder();
    n.unify_nonorientable();
    let mut d = n.rest.clone();
    let mut conjugator = Word::empty();
    if d.is_empty() {
        if let Some(k) = n
            .atoms
            .iter()
            .rposition(|a| matches!(a, Atom::Conjugate(..)))
        {
            let Atom::Conjugate(z, c) = n.atoms.remove(k) else {
                unreachable!()
            };
            let zw = Word::symbol(&z);
            let sigma: Assignment = n
                .atoms
                .iter()
                .flat_map(|a| match a {
                    Atom::Conjugate(u, _) => vec![(u.clone(), Word::symbol(u).mul(&zw))],
                    _ => a
                        .variables()
                        .into_iter()
                        .map(|v| (v.clone(), Word::symbol(&v).conjugate(&zw)))
                        .collect(),
                })
                .collect();
            n.apply(&sigma, false);
            d = c;
            conjugator = zw;
        }
    }
    let present = n.atoms.iter().flat_map(Atom::variables).collect::<Vec<_>>();
    let free_variables = vars
        .iter()
        .filter(|v| !present.contains(v))
        .cloned()
        .collect();
    let standard = StandardQuadratic {
        atoms: n.atoms,
        d,
        free_variables,
    };
    let lhs = w.substitute_map(&n.phi);
    if lhs != standard.word().conjugate(&conjugator) {
        return Err(Error::Invalid(format!(
            "normalization identity failed for `{w}`"
        )));
    }
    Ok(Normalization {
        standard,
        automorphism: n.phi,
        conjugator,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionKind {
    Degenerate,
    Commutative,
    GeneralPosition,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionClass {
    pub kind: SolutionKind,
    /// Whether consecutive atom images commute.
    pub commuting: Vec<bool>,
}

impl SolutionClass {
    pub fn is_commutative(&self) -> bool {
        self.commuting.iter().all(|&c| c)
    }
}

/// Classifies a solution by which consecutive atom images commute.
pub fn classify_solution(
    s: &StandardQuadratic,
    phi: &Assignment,
    target: &dyn Group,
) -> Result<SolutionClass> {
    if s.atoms.len() < 2 {
        return Err(Error::Invalid(
            "classification needs at least two atoms".into(),
        ));
    }
    if !target.is_trivial(&s.word().substitute_map(phi))? {
        return Err(Error::NotASolution(0));
    }
    let images: Vec<Word> = s
        .atom_words()
        .iter()
        .map(|r| r.substitute_map(phi))
        .collect();
    let mut commuting = Vec::new();
    for pair in images.windows(2) {
        commuting.push(target.commute(&pair[0], &pair[1])?);
    }
    let mut degenerate = false;
    for r in &images {
        degenerate |= target.is_trivial(r)?;
    }
    let kind = if degenerate {
        SolutionKind::Degenerate
    } else if commuting.iter().all(|&c| c) {
        SolutionKind::Commutative
    } else if commuting.iter().all(|&c| !c) {
        SolutionKind::GeneralPosition
    } else {
        SolutionKind::Mixed
    };
    Ok(SolutionClass { kind, commuting })
}

/// Evidence about the existence of a solution in general position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneralPosition {
    /// A non-commutative solution. Over CSA targets its existence implies a
    /// solution in general position; `in_general_position` says whether this
    /// witness already is one.
    Found {
        witness: Assignment,
        in_general_position: bool,
    },
    AllCommutativeUpToBound {
        solutions_checked: usize,
    },
}

/// Bounded search for a non-commutative solution.
pub fn detect_general_position(
    s: &StandardQuadratic,
    group: std::sync::Arc<crate::presentation::Presentation>,
    target: &dyn Group,
    radius: usize,
) -> Result<GeneralPosition> {
    if s.atoms.len() < 2 {
        return Err(Error::Invalid(
            "general position needs at least two atoms".into(),
        ));
    }
    let sys = EqSystem::new("standard", group, s.variables(), vec![s.word()])?;
    let sols = sys.hom_search(target, radius, None)?;
    let mut best: Option<Assignment> = None;
    for phi in &sols {
        let class = classify_solution(s, phi, target)?;
        if class.kind == SolutionKind::GeneralPosition {
            return Ok(GeneralPosition::Found {
                witness: phi.clone(),
                in_general_position: true,
            });
        }
        if !class.is_commutative() && best.is_none() {
            best = Some(phi.clone());
        }
    }
    Ok(match best {
        Some(witness) => GeneralPosition::Found {
            witness,
            in_general_position: false,
        },
        None => GeneralPosition::AllCommutativeUpToBound {
            solutions_checked: sols.len(),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    NotRegular,
    Unknown,
}

/// Regular: `[x,y]d`, `[x1,y1][x2,y2]`, or Euler characteristic at most -2
/// with a non-commutative solution.
pub fn is_regular(s: &StandardQuadratic, evidence: Option<&GeneralPosition>) -> Regularity {
    let orientable_no_coeffs = s.orientable() && s.m() == 0;
    if orientable_no_coeffs && s.genus() == 1 && !s.d.is_empty() {
        return Regularity::Regular;
    }
    if orientable_no_coeffs && s.genus() == 2 && s.d.is_empty() {
        return Regularity::Regular;
    }
    if s.euler_char() > -2 {
        return Regularity::NotRegular;
    }
    match evidence {
        Some(GeneralPosition::Found { .. }) => Regularity::Regular,
        _ => Regularity::Unknown,
    }
}
