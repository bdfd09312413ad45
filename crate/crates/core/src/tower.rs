//! Iterated extensions of centralizers over a base presentation, Britton
//! reduction, and homomorphisms into towers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::presentation::{Centralizer, Exactness, Presentation};
use crate::word::{ball, Alphabet, Letter, Symbol, Word};

/// One rank-1 extension `<G, t | [C(u), t]>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerLevel {
    pub letter: Symbol,
    /// The element `u` whose centralizer is extended, a word one level down.
    pub center_witness: Word,
    /// Generators of `C(u)` one level down.
    pub center_generators: Vec<Word>,
    pub exactness: Exactness,
}

/// A maximal non-cyclic abelian subgroup, up to conjugation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parabolic {
    /// A nontrivial element of the subgroup; the subgroup is its centralizer.
    pub representative: Word,
    pub generators: Vec<Word>,
    pub exactness: Exactness,
}

#[derive(Clone)]
pub struct Tower {
    name: String,
    base: Arc<Presentation>,
    levels: Vec<TowerLevel>,
    registry: Vec<Parabolic>,
    search_bound: usize,
}

impl PartialEq for Tower {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && *self.base == *other.base && self.levels == other.levels
    }
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tower")
            .field("name", &self.name)
            .field("base", &self.base.name())
            .field("levels", &self.levels)
            .finish()
    }
}

pub const DEFAULT_SEARCH_BOUND: usize = 2;

impl Tower {
    pub fn new(name: &str, base: Arc<Presentation>) -> Self {
        Tower {
            name: name.to_string(),
            base,
            levels: Vec::new(),
            registry: Vec::new(),
            search_bound: DEFAULT_SEARCH_BOUND,
        }
    }

    /// Radius used for the bounded conjugacy and root searches that
    /// `extend_centralizer` runs.
    pub fn with_search_bound(mut self, bound: usize) -> Self {
        self.search_bound = bound;
        self
    }

    pub fn search_bound(&self) -> usize {
        self.search_bound
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn base(&self) -> &Arc<Presentation> {
        &self.base
    }

    pub fn levels(&self) -> &[TowerLevel] {
        &self.levels
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn registry(&self) -> &[Parabolic] {
        &self.registry
    }

    pub fn stable_letters(&self) -> Vec<Symbol> {
        self.levels.iter().map(|l| l.letter.clone()).collect()
    }

    /// Generators of the group at height `h` (base generators, then the
    /// first `h` stable letters).
    pub fn generators_at(&self, h: usize) -> Vec<Symbol> {
        let mut g = self.base.generators().to_vec();
        g.extend(self.levels[..h].iter().map(|l| l.letter.clone()));
        g
    }

    pub fn generators(&self) -> Vec<Symbol> {
        self.generators_at(self.height())
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.generators())
    }

    /// Base relators followed by `[t, c]` for every level and every center
    /// generator `c`.
    pub fn relators(&self) -> Vec<Word> {
        let mut rels = self.base.relators().to_vec();
        for l in &self.levels {
            let t = Word::symbol(&l.letter);
            for c in &l.center_generators {
                rels.push(Word::commutator(&t, c));
            }
        }
        rels
    }

    /// The whole tower as a single finite presentation (not used for the
    /// word problem, which goes through Britton reduction).
    pub fn total_presentation(&self) -> Result<Presentation> {
        Presentation::new(&self.name, self.generators(), self.relators())
    }

    fn level_of(&self, s: &Symbol) -> Option<usize> {
        self.levels.iter().position(|l| &l.letter == s)
    }

    /// Reduces `w` at height `h`: removes every pinch of the top stable
    /// letter using a stack, then reduces the remaining segments one level
    /// down. At height 0 this is the base Dehn reduction.
    fn reduce_at(&self, w: &Word, h: usize) -> Word {
        if h == 0 {
            return self.base.dehn_reduce(w);
        }
        let level = &self.levels[h - 1];
        let t = &level.letter;
        if !w.contains_symbol(t) {
            return self.reduce_at(w, h - 1);
        }
        let mut segs: Vec<Word> = vec![Word::empty()];
        let mut stables: Vec<bool> = Vec::new();
        for l in w.letters() {
            if &l.symbol == t {
                let pinch = stables.last().is_some_and(|&inv| inv != l.inverse)
                    && self.commutes_at(segs.last().unwrap(), &level.center_witness, h - 1);
                if pinch {
                    let v = segs.pop().unwrap();
                    stables.pop();
                    let top = segs.last_mut().unwrap();
                    *top = top.mul(&v);
                } else {
                    stables.push(l.inverse);
                    segs.push(Word::empty());
                }
            } else {
                let top = segs.last_mut().unwrap();
                *top = top.mul(&Word::letter(l.clone()));
            }
        }
        let mut out = self.reduce_at(&segs[0], h - 1);
        for (inv, seg) in stables.iter().zip(&segs[1..]) {
            out = out.mul(&Word::letter(Letter::new(t.clone(), *inv)));
            out = out.mul(&self.reduce_at(seg, h - 1));
        }
        out
    }

    fn commutes_at(&self, v: &Word, u: &Word, h: usize) -> bool {
        v.is_empty() || self.reduce_at(&Word::commutator(v, u), h).is_empty()
    }

    /// Britton reduction over the full tower. The output contains no pinch
    /// `t^e v t^-e` with `v` in the associated centralizer.
    pub fn britton_reduce(&self, w: &Word) -> Result<Word> {
        self.alphabet().check(w)?;
        Ok(self.reduce_at(w, self.height()))
    }

    fn wp_at(&self, w: &Word, h: usize) -> Result<bool> {
        Alphabet::new(self.generators_at(h)).check(w)?;
        if !self.base.has_decidable_wp() {
            // surfaces the base's own error
            self.base.wp(&Word::empty())?;
        }
        Ok(self.reduce_at(w, h).is_empty())
    }

    /// The word problem: `Ok(true)` when `w` is trivial. By Britton's lemma a
    /// reduced word with a surviving stable letter is nontrivial, so this is
    /// emptiness of the fully reduced word.
    pub fn wp(&self, w: &Word) -> Result<bool> {
        self.wp_at(w, self.height())
    }

    pub fn has_decidable_wp(&self) -> bool {
        self.base.has_decidable_wp()
    }

    /// Locates a pinch left in `w`, if any: two occurrences of a stable
    /// letter with opposite signs separated only by letters of lower levels
    /// lying in the associated centralizer.
    pub fn find_pinch(&self, w: &Word) -> Option<(usize, usize)> {
        let letters = w.letters();
        for (k, level) in self.levels.iter().enumerate() {
            let mut last: Option<usize> = None;
            for (i, l) in letters.iter().enumerate() {
                match self.level_of(&l.symbol) {
                    Some(j) if j == k => {
                        if let Some(p) = last {
                            if letters[p].inverse != l.inverse {
                                let v = Word::from_letters(letters[p + 1..i].to_vec());
                                if self.commutes_at(&v, &level.center_witness, k) {
                                    return Some((p, i));
                                }
                            }
                        }
                        last = Some(i);
                    }
                    Some(j) if j > k => last = None,
                    _ => {}
                }
            }
        }
        None
    }

    /// Cyclic Britton reduction: returns a core and `c` with
    /// `w = c^-1 core c` in the tower.
    pub fn cyclic_reduce(&self, w: &Word) -> (Word, Word) {
        let h = self.height();
        let mut conj = Word::empty();
        let mut cur = self.reduce_at(w, h);
        loop {
            let (core, c) = cur.cyclic_reduce();
            conj = c.mul(&conj);
            let mut improved = None;
            for k in 1..core.len() {
                let red = self.reduce_at(&core.rotate(k), h);
                if red.len() < core.len() {
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

    /// Searches for `c` with `c g c^-1` in the registry entry `p`.
    fn conjugate_into(
        &self,
        g: &Word,
        core_conj: &Word,
        p: &Parabolic,
        bound: usize,
    ) -> Option<Word> {
        let h = self.height();
        let inside = |c: &Word| {
            let x = Word::product([c, g, &c.inverse()]);
            self.commutes_at(&x, &p.representative, h)
        };
        if inside(core_conj) {
            return Some(core_conj.clone());
        }
        let gens = self.generators();
        ball(&gens, bound).into_iter().find_map(|b| {
            let c = b.mul(core_conj);
            if inside(&c) {
                Some(c)
            } else if inside(&b) {
                Some(b)
            } else {
                None
            }
        })
    }

    fn centralizer_with_source(
        &self,
        g: &Word,
        bound: usize,
    ) -> Result<(Centralizer, Option<usize>)> {
        if self.wp(g)? {
            return Err(Error::Invalid(
                "centralizer of the identity is the whole group".into(),
            ));
        }
        let (core, c) = self.cyclic_reduce(g);
        for (i, p) in self.registry.iter().enumerate() {
            if let Some(x) = self.conjugate_into(g, &c, p, bound) {
                let generators = p.generators.iter().map(|q| q.conjugate(&x)).collect();
                return Ok((
                    Centralizer {
                        generators,
                        exactness: p.exactness,
                    },
                    Some(i),
                ));
            }
        }
        if self.height() == 0 {
            return Ok((self.base.centralizer_base(g, bound)?, None));
        }
        let h = self.height();
        let (mut best, mut best_pow) = core.primitive_root();
        for r in ball(&self.generators(), bound) {
            if r.is_empty() || !self.commutes_at(&r, &core, h) {
                continue;
            }
            for k in (best_pow + 1)..=core.len() {
                for e in [k as i64, -(k as i64)] {
                    if self.reduce_at(&r.pow(e).mul(&core.inverse()), h).is_empty() {
                        best = if e > 0 { r.clone() } else { r.inverse() };
                        best_pow = k;
                    }
                }
            }
        }
        let generators = vec![best.conjugate(&c)];
        Ok((
            Centralizer {
                generators,
                exactness: Exactness::BoundLimited,
            },
            None,
        ))
    }

    /// Generators of `C(g)`: the conjugated generators of a registry entry if
    /// `g` is conjugate into one within `bound`, otherwise a single root.
    pub fn centralizer(&self, g: &Word, bound: usize) -> Result<Centralizer> {
        self.alphabet().check(g)?;
        Ok(self.centralizer_with_source(g, bound)?.0)
    }

    fn fresh_letter(&self, taken: &[Symbol]) -> Symbol {
        let gens = self.generators();
        (1..)
            .map(|i| Symbol::new(&format!("t{i}")))
            .find(|s| !gens.contains(s) && !taken.contains(s))
            .unwrap()
    }

    /// Appends `rank` commuting stable letters extending `C(u)`. Letter names
    /// come from `names` when given, otherwise fresh `t1, t2, ...`.
    pub fn extend_centralizer(
        &self,
        u: &Word,
        rank: usize,
        names: Option<&[Symbol]>,
    ) -> Result<Tower> {
        if rank == 0 {
            return Err(Error::Invalid("extension rank must be positive".into()));
        }
        self.alphabet().check(u)?;
        if self.wp(u)? {
            return Err(Error::Invalid(format!(
                "cannot extend the centralizer of the trivial element `{u}`"
            )));
        }
        let mut letters: Vec<Symbol> = Vec::new();
        for i in 0..rank {
            let s = match names {
                Some(n) => n.get(i).cloned().ok_or_else(|| {
                    Error::Invalid(format!("{rank} letter names required, {} given", n.len()))
                })?,
                None => self.fresh_letter(&letters),
            };
            if !Symbol::is_valid_name(s.as_str())
                || self.generators().contains(&s)
                || letters.contains(&s)
            {
                return Err(Error::Invalid(format!("stable letter `{s}` is not fresh")));
            }
            letters.push(s);
        }
        let (cent, source) = self.centralizer_with_source(u, self.search_bound)?;
        let mut next = self.clone();
        let mut gens = cent.generators.clone();
        for t in &letters {
            next.levels.push(TowerLevel {
                letter: t.clone(),
                center_witness: u.clone(),
                center_generators: gens.clone(),
                exactness: cent.exactness,
            });
            gens.push(Word::symbol(t));
        }
        let entry = Parabolic {
            representative: u.clone(),
            generators: gens,
            exactness: cent.exactness,
        };
        match source {
            Some(i) => next.registry[i] = entry,
            None => next.registry.push(entry),
        }
        Ok(next)
    }

    /// The free product of this tower with a free group on `gens`, realized
    /// by adding the generators to the base. Centralizers of the old
    /// elements do not change, so the levels carry over.
    pub fn with_free_generators(&self, gens: &[Symbol]) -> Result<Tower> {
        let mut all = self.base.generators().to_vec();
        let taken = self.generators();
        for g in gens {
            if taken.contains(g) || all.contains(g) {
                return Err(Error::Invalid(format!("generator `{g}` already present")));
            }
            all.push(g.clone());
        }
        let base = Presentation::new(self.base.name(), all, self.base.relators().to_vec())?
            .with_dehn_override(self.base.dehn_override());
        let mut next = self.clone();
        next.base = Arc::new(base);
        Ok(next)
    }

    /// Records an abelian subgroup introduced by an embedding; its generators
    /// must pairwise commute.
    pub fn register_parabolic(&mut self, generators: Vec<Word>) -> Result<()> {
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !self.wp(&Word::commutator(a, b))? {
                    return Err(Error::Invalid(format!("`{a}` and `{b}` do not commute")));
                }
            }
        }
        let Some(rep) = generators.iter().find(|g| !g.is_empty()).cloned() else {
            return Err(Error::Invalid(
                "parabolic needs a nontrivial generator".into(),
            ));
        };
        self.registry.push(Parabolic {
            representative: rep,
            generators,
            exactness: Exactness::BoundLimited,
        });
        Ok(())
    }
}

/// The domain of a homomorphism.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceGroup {
    Presentation(Arc<Presentation>),
    Tower(Arc<Tower>),
}

impl SourceGroup {
    pub fn name(&self) -> &str {
        match self {
            SourceGroup::Presentation(p) => p.name(),
            SourceGroup::Tower(t) => t.name(),
        }
    }

    pub fn generators(&self) -> Vec<Symbol> {
        match self {
            SourceGroup::Presentation(p) => p.generators().to_vec(),
            SourceGroup::Tower(t) => t.generators(),
        }
    }

    pub fn relators(&self) -> Vec<Word> {
        match self {
            SourceGroup::Presentation(p) => p.relators().to_vec(),
            SourceGroup::Tower(t) => t.relators(),
        }
    }

    pub fn has_decidable_wp(&self) -> bool {
        match self {
            SourceGroup::Presentation(p) => p.has_decidable_wp(),
            SourceGroup::Tower(t) => t.has_decidable_wp(),
        }
    }

    pub fn wp(&self, w: &Word) -> Result<bool> {
        match self {
            SourceGroup::Presentation(p) => p.wp(w),
            SourceGroup::Tower(t) => t.wp(w),
        }
    }

    fn is_free(&self) -> bool {
        matches!(self, SourceGroup::Presentation(p) if p.is_free())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomStatus {
    Unverified,
    RelatorsVerified,
    InjectivitySampled(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Injectivity {
    /// No collision among this many pairwise-distinct ball elements.
    Pass { elements: usize },
    /// Two distinct source elements with equal images.
    Counterexample(Word, Word),
}

/// A homomorphism given by images of the source generators.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub source: SourceGroup,
    pub target: Arc<Tower>,
    pub images: BTreeMap<Symbol, Word>,
    pub status: HomStatus,
}

impl GroupHom {
    pub fn new(
        source: SourceGroup,
        target: Arc<Tower>,
        images: BTreeMap<Symbol, Word>,
    ) -> Result<Self> {
        let alpha = target.alphabet();
        for g in source.generators() {
            let img = images
                .get(&g)
                .ok_or_else(|| Error::Invalid(format!("generator `{g}` has no image")))?;
            alpha.check(img)?;
        }
        if let Some(extra) = images.keys().find(|k| !source.generators().contains(k)) {
            return Err(Error::AlphabetMismatch(extra.to_string()));
        }
        Ok(GroupHom {
            source,
            target,
            images,
            status: HomStatus::Unverified,
        })
    }

    pub fn apply(&self, w: &Word) -> Word {
        w.substitute_map(&self.images)
    }

    /// Checks every source relator maps to the identity.
    pub fn verify(&mut self) -> Result<HomStatus> {
        for (index, r) in self.source.relators().iter().enumerate() {
            if !self.target.wp(&self.apply(r))? {
                return Err(Error::RelatorFailed {
                    index,
                    relator: r.to_string(),
                });
            }
        }
        if self.status == HomStatus::Unverified {
            self.status = HomStatus::RelatorsVerified;
        }
        Ok(self.status)
    }

    /// Checks that distinct elements of the source ball of `radius` have
    /// distinct images.
    pub fn injectivity_sample(&mut self, radius: usize) -> Result<Injectivity> {
        if !self.source.has_decidable_wp() {
            return Err(Error::UnsupportedPresentation(format!(
                "source `{}` has no decidable word problem",
                self.source.name()
            )));
        }
        let words = ball(&self.source.generators(), radius);
        let elements = if self.source.is_free() {
            words
        } else {
            distinct_elements(words, |w| self.source.wp(w))?
        };
        let target = &self.target;
        let images: Vec<Word> = elements
            .par_iter()
            .map(|w| target.reduce_at(&self.apply(w), target.height()))
            .collect();
        let buckets = bucket_by_abelian_image(
            &images,
            target
                .relators()
                .iter()
                .all(|r| r.exponent_sums().is_empty()),
        );
        let collision = buckets.par_iter().find_map_any(|idx| {
            for (a, &i) in idx.iter().enumerate() {
                for &j in &idx[a + 1..] {
                    let e = images[i].mul(&images[j].inverse());
                    if target.reduce_at(&e, target.height()).is_empty() {
                        return Some((i, j));
                    }
                }
            }
            None
        });
        match collision {
            Some((i, j)) => Ok(Injectivity::Counterexample(
                elements[i].clone(),
                elements[j].clone(),
            )),
            None => {
                if self.status == HomStatus::RelatorsVerified
                    || self.status == HomStatus::Unverified
                {
                    self.status = HomStatus::InjectivitySampled(radius);
                } else if let HomStatus::InjectivitySampled(r) = self.status {
                    self.status = HomStatus::InjectivitySampled(r.max(radius));
                }
                Ok(Injectivity::Pass {
                    elements: elements.len(),
                })
            }
        }
    }
}

/// Groups indices by exponent-sum vector when that is an invariant of the
/// group (all relators have zero exponent sums); otherwise one bucket.
fn bucket_by_abelian_image(words: &[Word], invariant: bool) -> Vec<Vec<usize>> {
    if !invariant {
        return vec![(0..words.len()).collect()];
    }
    let mut map: HashMap<Vec<(Symbol, i64)>, Vec<usize>> = HashMap::new();
    for (i, w) in words.iter().enumerate() {
        map.entry(w.exponent_sums().into_iter().collect())
            .or_default()
            .push(i);
    }
    let mut buckets: Vec<Vec<usize>> = map.into_values().collect();
    buckets.sort();
    buckets
}

fn distinct_elements<F>(words: Vec<Word>, wp: F) -> Result<Vec<Word>>
where
    F: Fn(&Word) -> Result<bool>,
{
    let mut kept: Vec<Word> = Vec::new();
    'outer: for w in words {
        for k in &kept {
            if wp(&w.mul(&k.inverse()))? {
                continue 'outer;
            }
        }
        kept.push(w);
    }
    Ok(kept)
}
