//! Systems of equations over the base group: evaluation, triangulation,
//! bounded solution search and radical sampling.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::presentation::Presentation;
use crate::word::{ball, Letter, Symbol, Word};

/// A map from variables to words over some target group.
pub type Assignment = BTreeMap<Symbol, Word>;

/// A finite system `equations = 1` in `variables` with constants from
/// `group`.
#[derive(Clone, Debug, PartialEq)]
pub struct EqSystem {
    pub name: String,
    pub group: Arc<Presentation>,
    pub variables: Vec<Symbol>,
    pub equations: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evaluation {
    Satisfied,
    Violated(usize),
}

impl EqSystem {
    pub fn new(
        name: &str,
        group: Arc<Presentation>,
        variables: Vec<Symbol>,
        equations: Vec<Word>,
    ) -> Result<Self> {
        for (i, v) in variables.iter().enumerate() {
            if !Symbol::is_valid_name(v.as_str()) {
                return Err(Error::Invalid(format!("invalid variable name `{v}`")));
            }
            if variables[..i].contains(v) {
                return Err(Error::Invalid(format!("duplicate variable `{v}`")));
            }
            if group.generators().contains(v) {
                return Err(Error::Invalid(format!(
                    "variable `{v}` clashes with a generator of `{}`",
                    group.name()
                )));
            }
        }
        for e in &equations {
            if let Some(l) = e
                .letters()
                .iter()
                .find(|l| !variables.contains(&l.symbol) && !group.generators().contains(&l.symbol))
            {
                return Err(Error::AlphabetMismatch(l.symbol.to_string()));
            }
        }
        Ok(EqSystem {
            name: name.to_string(),
            group,
            variables,
            equations,
        })
    }

    pub fn is_variable(&self, s: &Symbol) -> bool {
        self.variables.contains(s)
    }

    pub fn coefficient_free(&self) -> bool {
        self.equations
            .iter()
            .all(|e| e.letters().iter().all(|l| self.is_variable(&l.symbol)))
    }

    /// Substitutes `phi` (missing variables count as an error) and tests each
    /// equation with the target's word problem.
    pub fn evaluate(&self, phi: &Assignment, target: &dyn Group) -> Result<Evaluation> {
        if let Some(v) = self.variables.iter().find(|v| !phi.contains_key(*v)) {
            return Err(Error::Invalid(format!("variable `{v}` is not assigned")));
        }
        for (i, e) in self.equations.iter().enumerate() {
            if !target.is_trivial(&e.substitute_map(phi))? {
                return Ok(Evaluation::Violated(i));
            }
        }
        Ok(Evaluation::Satisfied)
    }

    /// The naive presentation `<X, A | S, R>` of the coordinate group.
    pub fn coordinate_presentation(&self) -> Result<Presentation> {
        let mut gens = self.variables.clone();
        gens.extend(self.group.generators().iter().cloned());
        let mut rels = self.equations.clone();
        rels.extend(self.group.relators().iter().cloned());
        Presentation::new(&format!("{}_coord", self.name), gens, rels)
    }

    /// For a coefficient-free system, the group `<X | S>`.
    pub fn as_group(&self) -> Result<Presentation> {
        if !self.coefficient_free() {
            return Err(Error::Invalid(format!(
                "system `{}` has coefficients",
                self.name
            )));
        }
        Presentation::new(&self.name, self.variables.clone(), self.equations.clone())
    }

    /// All solutions with images drawn from the ball of `radius` over the
    /// target's generators, in lexicographic order of the ball.
    pub fn hom_search(
        &self,
        target: &dyn Group,
        radius: usize,
        limit: Option<usize>,
    ) -> Result<Vec<Assignment>> {
        let domain = ball(&target.generators(), radius);
        self.search_domain(target, &domain, limit)
    }

    /// Backtracking search over an explicit candidate list for every
    /// variable. Each equation is tested as soon as its last variable (in
    /// declaration order) is assigned.
    pub fn search_domain(
        &self,
        target: &dyn Group,
        domain: &[Word],
        limit: Option<usize>,
    ) -> Result<Vec<Assignment>> {
        let n = self.variables.len();
        let mut due: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.equations.iter().enumerate() {
            let last = e
                .letters()
                .iter()
                .filter_map(|l| self.variables.iter().position(|v| *v == l.symbol))
                .max();
            match last {
                Some(k) => due[k].push(i),
                None => {
                    if !target.is_trivial(e)? {
                        return Ok(Vec::new());
                    }
                }
            }
        }
        if n == 0 {
            return Ok(vec![Assignment::new()]);
        }
        let searcher = Searcher {
            sys: self,
            target,
            domain,
            due: &due,
        };
        let mut out = Vec::new();
        let chunk = rayon::current_num_threads().max(1) * 2;
        for block in domain.chunks(chunk) {
            let parts: Vec<Result<Vec<Assignment>>> = block
                .par_iter()
                .map(|w| {
                    let mut phi = Assignment::new();
                    let mut found = Vec::new();
                    searcher.extend(&mut phi, 0, w, &mut found, limit)?;
                    Ok(found)
                })
                .collect();
            for p in parts {
                out.extend(p?);
            }
            if limit.is_some_and(|l| out.len() >= l) {
                out.truncate(limit.unwrap());
                break;
            }
        }
        Ok(out)
    }

    /// Tests whether `w` (a word over variables and constants) lies in the
    /// radical, as far as the solutions found within `radius` can tell.
    pub fn radical_sample(
        &self,
        w: &Word,
        target: &dyn Group,
        radius: usize,
    ) -> Result<RadicalEvidence> {
        let sols = self.hom_search(target, radius, None)?;
        for phi in &sols {
            if !target.is_trivial(&w.substitute_map(phi))? {
                return Ok(RadicalEvidence::Excluded(phi.clone()));
            }
        }
        Ok(RadicalEvidence::InRadicalUpToBound {
            solutions_checked: sols.len(),
        })
    }

    /// Splits every equation into triangles and constant equations.
    pub fn triangulate(&self) -> TriangularSystem {
        Triangulator::new(self).run()
    }
}

struct Searcher<'a> {
    sys: &'a EqSystem,
    target: &'a dyn Group,
    domain: &'a [Word],
    due: &'a [Vec<usize>],
}

impl Searcher<'_> {
    fn extend(
        &self,
        phi: &mut Assignment,
        k: usize,
        w: &Word,
        found: &mut Vec<Assignment>,
        limit: Option<usize>,
    ) -> Result<()> {
        if limit.is_some_and(|l| found.len() >= l) {
            return Ok(());
        }
        let var = &self.sys.variables[k];
        phi.insert(var.clone(), w.clone());
        let mut ok = true;
        for &i in &self.due[k] {
            if !self
                .target
                .is_trivial(&self.sys.equations[i].substitute_map(phi))?
            {
                ok = false;
                break;
            }
        }
        if ok {
            if k + 1 == self.sys.variables.len() {
                found.push(phi.clone());
            } else {
                for next in self.domain {
                    self.extend(phi, k + 1, next, found, limit)?;
                }
            }
        }
        phi.remove(var);
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RadicalEvidence {
    /// A solution sending the word to a nontrivial element; definitive.
    Excluded(Assignment),
    InRadicalUpToBound {
        solutions_checked: usize,
    },
}

/// A system in which every equation is either `z z' z'' = 1` or `z = c`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularSystem {
    pub group: Arc<Presentation>,
    pub original_variables: Vec<Symbol>,
    /// Original variables first, then fresh ones in creation order.
    pub variables: Vec<Symbol>,
    pub triangles: Vec<[usize; 3]>,
    pub constants: Vec<(usize, Word)>,
    /// Each fresh variable's value as a word in original variables and
    /// constants.
    pub log: Vec<(Symbol, Word)>,
}

impl TriangularSystem {
    pub fn equation_words(&self) -> Vec<Word> {
        let mut eqs: Vec<Word> = self
            .triangles
            .iter()
            .map(|t| {
                Word::product(
                    t.iter()
                        .map(|&i| Word::symbol(&self.variables[i]))
                        .collect::<Vec<_>>()
                        .iter(),
                )
            })
            .collect();
        for (i, c) in &self.constants {
            eqs.push(Word::symbol(&self.variables[*i]).mul(&c.inverse()));
        }
        eqs
    }

    pub fn as_system(&self, name: &str) -> Result<EqSystem> {
        EqSystem::new(
            name,
            self.group.clone(),
            self.variables.clone(),
            self.equation_words(),
        )
    }

    /// Extends a solution of the original system by the logged definitions.
    pub fn extend_solution(&self, phi: &Assignment) -> Assignment {
        let mut out: Assignment = self
            .original_variables
            .iter()
            .map(|v| (v.clone(), phi[v].clone()))
            .collect();
        for (v, def) in &self.log {
            out.insert(v.clone(), def.substitute_map(phi));
        }
        out
    }

    /// Restricts a solution of the triangular system to the original
    /// variables.
    pub fn restrict_solution(&self, psi: &Assignment) -> Assignment {
        self.original_variables
            .iter()
            .map(|v| (v.clone(), psi[v].clone()))
            .collect()
    }
}

struct Triangulator<'a> {
    sys: &'a EqSystem,
    variables: Vec<Symbol>,
    taken: BTreeSet<Symbol>,
    triangles: Vec<[usize; 3]>,
    constants: Vec<(usize, Word)>,
    log: Vec<(Symbol, Word)>,
    one: Option<usize>,
    inverses: BTreeMap<Symbol, usize>,
}

impl<'a> Triangulator<'a> {
    fn new(sys: &'a EqSystem) -> Self {
        let mut taken: BTreeSet<Symbol> = sys.variables.iter().cloned().collect();
        taken.extend(sys.group.generators().iter().cloned());
        Triangulator {
            sys,
            variables: sys.variables.clone(),
            taken,
            triangles: Vec::new(),
            constants: Vec::new(),
            log: Vec::new(),
            one: None,
            inverses: BTreeMap::new(),
        }
    }

    fn fresh(&mut self, stem: &str, def: Word) -> usize {
        let s = (1..)
            .map(|i| Symbol::new(&format!("{stem}_{i}")))
            .find(|s| !self.taken.contains(s))
            .unwrap();
        self.taken.insert(s.clone());
        self.variables.push(s.clone());
        self.log.push((s, def));
        self.variables.len() - 1
    }

    fn index(&self, s: &Symbol) -> usize {
        self.variables.iter().position(|v| v == s).unwrap()
    }

    fn one(&mut self) -> usize {
        if let Some(e) = self.one {
            return e;
        }
        let e = self.fresh("e", Word::empty());
        self.constants.push((e, Word::empty()));
        self.one = Some(e);
        e
    }

    /// Index of a variable standing for `l` (a fresh inverse when `l` is an
    /// inverse letter), together with its defining word.
    fn signed(&mut self, l: &Letter) -> usize {
        let base = self.index(&l.symbol);
        if !l.inverse {
            return base;
        }
        if let Some(&i) = self.inverses.get(&l.symbol) {
            return i;
        }
        let e = self.one();
        let stem = format!("{}_inv", l.symbol);
        let i = self.fresh(&stem, Word::letter(l.clone()));
        self.triangles.push([base, i, e]);
        self.inverses.insert(l.symbol.clone(), i);
        i
    }

    fn definition(&self, i: usize) -> Word {
        let s = &self.variables[i];
        match self.log.iter().find(|(v, _)| v == s) {
            Some((_, d)) => d.clone(),
            None => Word::symbol(s),
        }
    }

    fn run(mut self) -> TriangularSystem {
        let sys = self.sys;
        for eq in &sys.equations {
            let occurrences: Vec<usize> = (0..eq.len())
                .filter(|&i| sys.is_variable(&eq.letters()[i].symbol))
                .collect();
            if occurrences.len() == 1 {
                // P z^e Q = 1 pins z
                let i = occurrences[0];
                let l = &eq.letters()[i];
                let p = eq.subword(0, i);
                let q = eq.subword(i + 1, eq.len());
                let val = p.inverse().mul(&q.inverse());
                let val = if l.inverse { val.inverse() } else { val };
                let z = self.index(&l.symbol);
                self.constants.push((z, val));
                continue;
            }
            let mut items: Vec<usize> = Vec::new();
            let mut seg: Vec<Letter> = Vec::new();
            for l in eq.letters() {
                if sys.is_variable(&l.symbol) {
                    if !seg.is_empty() {
                        items.push(self.constant_item(std::mem::take(&mut seg)));
                    }
                    let i = self.signed(l);
                    items.push(i);
                } else {
                    seg.push(l.clone());
                }
            }
            if !seg.is_empty() {
                items.push(self.constant_item(seg));
            }
            self.chain(items);
        }
        TriangularSystem {
            group: sys.group.clone(),
            original_variables: sys.variables.clone(),
            variables: self.variables,
            triangles: self.triangles,
            constants: self.constants,
            log: self.log,
        }
    }

    fn constant_item(&mut self, seg: Vec<Letter>) -> usize {
        let c = Word::from_letters(seg);
        let i = self.fresh("k", c.clone());
        self.constants.push((i, c));
        i
    }

    /// Turns `y1 y2 ... yk = 1` into triangles.
    fn chain(&mut self, mut items: Vec<usize>) {
        match items.len() {
            0 => {}
            1 => self.constants.push((items[0], Word::empty())),
            2 => {
                let e = self.one();
                self.triangles.push([items[0], items[1], e]);
            }
            3 => self.triangles.push([items[0], items[1], items[2]]),
            _ => {
                // y1 y2 u' = 1, u u' e = 1, u y3 ... yk = 1
                let u_def = self.definition(items[0]).mul(&self.definition(items[1]));
                let e = self.one();
                let u = self.fresh("u", u_def.clone());
                let u_inv = self.fresh("u", u_def.inverse());
                self.triangles.push([items[0], items[1], u_inv]);
                self.triangles.push([u, u_inv, e]);
                items.splice(0..2, [u]);
                self.chain(items);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::PermGroup;
    use crate::word::symbols;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn free(names: &[&str]) -> Arc<Presentation> {
        Arc::new(Presentation::free("F", symbols(names)).unwrap())
    }

    fn sys(g: Arc<Presentation>, vars: &[&str], eqs: &[&str]) -> EqSystem {
        EqSystem::new("S", g, symbols(vars), eqs.iter().map(|e| w(e)).collect()).unwrap()
    }

    fn asg(pairs: &[(&str, &str)]) -> Assignment {
        pairs.iter().map(|(k, v)| (Symbol::new(k), w(v))).collect()
    }

    #[test]
    fn evaluate_examples() {
        let s = sys(free(&["a"]), &["x", "y"], &["[x,y]"]);
        let f = free(&["a"]);
        assert_eq!(
            s.evaluate(&asg(&[("x", "a"), ("y", "a a")]), &*f),
            Ok(Evaluation::Satisfied)
        );
        let s = sys(free(&["a", "b"]), &["x", "y"], &["[x,y]"]);
        let f = free(&["a", "b"]);
        assert_eq!(
            s.evaluate(&asg(&[("x", "a"), ("y", "b")]), &*f),
            Ok(Evaluation::Violated(0))
        );
        let s = sys(free(&["a", "b"]), &["x"], &["x x"]);
        assert_eq!(
            s.evaluate(&asg(&[("x", "a b")]), &*f),
            Ok(Evaluation::Violated(0))
        );
    }

    #[test]
    fn hom_search_examples() {
        let f1 = free(&["a"]);
        let s = sys(f1.clone(), &["x"], &["x^2"]);
        assert_eq!(
            s.hom_search(&*f1, 2, None).unwrap(),
            vec![asg(&[("x", "1")])]
        );
        let s = sys(f1.clone(), &["x", "y"], &["[x,y]"]);
        assert_eq!(s.hom_search(&*f1, 1, None).unwrap().len(), 9);
        let f2 = free(&["a", "b"]);
        let s = sys(f2.clone(), &["x", "y"], &["[x,y]"]);
        let sols = s.hom_search(&*f2, 1, None).unwrap();
        let b = ball(&symbols(&["a", "b"]), 1);
        let expected = b
            .iter()
            .flat_map(|x| b.iter().map(move |y| (x.clone(), y.clone())))
            .filter(|(x, y)| Word::commutator(x, y).is_empty())
            .count();
        assert_eq!(sols.len(), expected);
        assert_eq!(s.hom_search(&*f2, 1, Some(3)).unwrap(), sols[..3].to_vec());
    }

    #[test]
    fn triangulate_examples() {
        let f = free(&["a", "b"]);
        let t = sys(f.clone(), &["z1", "z2", "z3"], &["z1 z2 z3"]).triangulate();
        assert_eq!(t.triangles, vec![[0, 1, 2]]);
        assert!(t.log.is_empty() && t.constants.is_empty());

        let t = sys(f.clone(), &["z1", "z2", "z3", "z4"], &["z1 z2 z3 z4"]).triangulate();
        assert_eq!(t.triangles.len(), 3);
        assert_eq!(t.constants.len(), 1);
        let words: Vec<String> = t.equation_words().iter().map(|x| x.to_string()).collect();
        assert_eq!(words, vec!["z1 z2 u_2", "u_1 u_2 e_1", "u_1 z3 z4", "e_1"]);

        let t = sys(f, &["z1"], &["z1 b^-1 a^-1"]).triangulate();
        assert_eq!(t.constants, vec![(0, w("a b"))]);
    }

    #[test]
    fn triangulation_preserves_solutions_over_s3() {
        let f = free(&["a", "b"]);
        let s3 = PermGroup::s3(&symbols(&["a", "b"]));
        let s = sys(f, &["x", "y"], &["x a y^-1 b", "x y x y^-1"]);
        let t = s.triangulate();
        let ts = t.as_system("T").unwrap();
        let dom = s3.element_words();
        let sols = s.search_domain(&s3, &dom, None).unwrap();
        let tsols = ts.search_domain(&s3, &dom, None).unwrap();
        assert_eq!(sols.len(), tsols.len());
        for phi in &sols {
            let ext: Assignment = t
                .extend_solution(phi)
                .into_iter()
                .map(|(k, v)| (k, s3.normal_form(&v).unwrap()))
                .collect();
            assert_eq!(ts.evaluate(&ext, &s3), Ok(Evaluation::Satisfied));
        }
        for psi in &tsols {
            assert_eq!(
                s.evaluate(&t.restrict_solution(psi), &s3),
                Ok(Evaluation::Satisfied)
            );
        }
    }

    #[test]
    fn radical_examples() {
        let f1 = free(&["a"]);
        let s = sys(f1.clone(), &["x"], &["x x"]);
        assert!(matches!(
            s.radical_sample(&w("x"), &*f1, 2),
            Ok(RadicalEvidence::InRadicalUpToBound { .. })
        ));
        let f2 = free(&["a", "b"]);
        let s = sys(f2.clone(), &["x"], &["[x,a]"]);
        match s.radical_sample(&w("[x,b]"), &*f2, 1).unwrap() {
            RadicalEvidence::Excluded(phi) => assert!(!phi[&Symbol::new("x")].is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coordinate_presentations() {
        let f2 = free(&["a", "b"]);
        let p = sys(f2.clone(), &["x"], &["[x,a]"])
            .coordinate_presentation()
            .unwrap();
        assert_eq!(p.generators(), symbols(&["x", "a", "b"]).as_slice());
        assert_eq!(p.relators(), &[w("[x,a]")]);
        let p = sys(f2, &["x", "y"], &[]).coordinate_presentation().unwrap();
        assert!(p.is_free());
    }
}
