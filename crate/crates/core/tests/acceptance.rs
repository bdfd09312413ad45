//! Acceptance suite. Prints one PASS/FAIL line per criterion with its
//! measured time and budget, then exits nonzero if any criterion failed.
//!
//! Run with `cargo test --test acceptance -- --nocapture` (the target has no
//! libtest harness, so output is always shown).

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use ectower::canonical::{
    check_pullback, generate_instances, BruteForceSolver, CanonicalConfig, LeafSolver, Pullback,
};
use ectower::cli::bench_wp;
use ectower::embeddings::{
    embed_level, run_pipeline, Case, EmbedConfig, NtqLevel, NtqSystem, PipelineInput,
};
use ectower::equations::{Assignment, EqSystem, Evaluation};
use ectower::finite::PermGroup;
use ectower::presentation::Presentation;
use ectower::quadratic::{to_standard_form, StandardQuadratic};
use ectower::tower::{HomStatus, Injectivity, Tower};
use ectower::word::{random_word, symbols};
use ectower::{Letter, Symbol, Word};

const SEED: u64 = 0x5eed_2024;

type Outcome = Result<String, String>;

fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

fn f2_base() -> Arc<Presentation> {
    Arc::new(Presentation::free("F2", symbols(&["a", "b"])).unwrap())
}

fn f2() -> Tower {
    Tower::new("F2", f2_base())
}

fn quad(eq: &str) -> NtqLevel {
    NtqLevel::Quadratic { equation: w(eq) }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Height-3 tower over F(a,b): `t` over C(a), `s` over C(b t), `r` over C(a s).
fn height_three() -> Tower {
    let t = f2()
        .extend_centralizer(&w("a"), 1, Some(&symbols(&["t"])))
        .unwrap();
    let t = t
        .extend_centralizer(&w("b t"), 1, Some(&symbols(&["s"])))
        .unwrap();
    t.extend_centralizer(&w("a s"), 1, Some(&symbols(&["r"])))
        .unwrap()
}

fn genus_two() -> Presentation {
    Presentation::new("S2", symbols(&["a", "b", "c", "d"]), vec![w("[a,b][c,d]")]).unwrap()
}

// ---------------------------------------------------------------------------

fn relator_soundness() -> Outcome {
    let n3 = Presentation::new("N3", symbols(&["a", "b", "c"]), vec![w("a a b b c c")])
        .unwrap()
        .with_dehn_override(true);
    let n3 = Tower::new("N3", Arc::new(n3));
    let r1 = EmbedConfig {
        solution_radius: 1,
        ..Default::default()
    };
    let dflt = EmbedConfig::default();
    let suite: Vec<(Tower, NtqLevel, &EmbedConfig, Case)> = vec![
        (
            f2(),
            NtqLevel::Free {
                vars: symbols(&["x", "y"]),
            },
            &dflt,
            Case::Free { letters: 2 },
        ),
        (
            f2(),
            NtqLevel::CentralizerExt {
                center_of: w("a"),
                vars: symbols(&["x"]),
            },
            &dflt,
            Case::CentralizerExt { rank: 1 },
        ),
        (
            f2(),
            NtqLevel::FreeAbelian {
                vars: symbols(&["x", "y"]),
            },
            &dflt,
            Case::FreeAbelianSubstitute,
        ),
        (f2(), quad("x x"), &dflt, Case::Square),
        (f2(), quad("x x a^-2"), &dflt, Case::SquareConstant),
        (f2(), quad("x x y y"), &dflt, Case::TwoSquares),
        (f2(), quad("z^-1 a z a^-1"), &dflt, Case::ConjugateConstant),
        (
            f2(),
            quad("z^-1 a z y^-1 a y a^-2"),
            &dflt,
            Case::GenusZero { k: 2 },
        ),
        (
            f2(),
            quad("x x y y a^-2"),
            &dflt,
            Case::CommutativeSquares { p: 2, k: 0 },
        ),
        (
            f2(),
            quad("x x y y b^-2 a^-2"),
            &dflt,
            Case::TwoSquaresConstant,
        ),
        (
            f2(),
            quad("x x z^-1 a z b^-1 a^-1 b a^-2"),
            &dflt,
            Case::SquareConjugate,
        ),
        (f2(), quad("x x z^-1 a z a^-3"), &dflt, Case::SquarePinned),
        (
            f2(),
            quad("x x y y z z"),
            &r1,
            Case::ThreeSquaresCommutative,
        ),
        (
            n3,
            quad("x x y y z z"),
            &r1,
            Case::ThreeSquaresGeneralPosition,
        ),
    ];
    let n = suite.len();
    for (tower, level, cfg, case) in suite {
        let mut e = embed_level(&tower, &level, cfg).map_err(|e| format!("{level:?}: {e}"))?;
        ensure(e.trace.contains(&case), || {
            format!("{level:?}: expected {case}, trace {:?}", e.trace)
        })?;
        let status = e.hom.verify().map_err(|err| format!("{case}: {err}"))?;
        ensure(status == HomStatus::RelatorsVerified, || {
            format!("{case}: status {status:?}")
        })?;
    }
    Ok(format!("{n} instances, all relators_verified"))
}

fn britton_identity() -> Outcome {
    let e = embed_level(&f2(), &quad("x x y y b^-2 a^-2"), &EmbedConfig::default())
        .map_err(|e| e.to_string())?;
    ensure(e.trace == vec![Case::TwoSquaresConstant], || {
        format!("trace {:?}", e.trace)
    })?;
    ensure(e.tower.height() == 3, || {
        format!("height {}", e.tower.height())
    })?;
    let x = &e.hom.images[&Symbol::new("x")];
    let y = &e.hom.images[&Symbol::new("y")];
    let img = Word::product([x, x, y, y, &w("b^-2 a^-2")]);
    let reduced = e.tower.britton_reduce(&img).map_err(|e| e.to_string())?;
    ensure(reduced.is_empty(), || {
        format!("psi(x^2 y^2 d) reduces to `{reduced}`")
    })?;
    Ok(format!(
        "x -> {x}, y -> {y}; image of length {} reduces to 1",
        img.len()
    ))
}

fn injectivity(level: NtqLevel) -> Outcome {
    let mut e = embed_level(&f2(), &level, &EmbedConfig::default()).map_err(|e| e.to_string())?;
    match e.hom.injectivity_sample(3).map_err(|e| e.to_string())? {
        Injectivity::Pass { elements } => {
            Ok(format!("{elements} distinct ball elements, no collision"))
        }
        Injectivity::Counterexample(u, v) => Err(format!("`{u}` and `{v}` collide")),
    }
}

fn polynomial_wp() -> Outcome {
    let t = height_three();
    let r = bench_wp(&t, &[100, 200, 400, 800, 1600, 3200], 5, SEED).map_err(|e| e.to_string())?;
    let rows: Vec<String> = r
        .rows
        .iter()
        .map(|(n, s)| format!("{n}:{:.2}ms", s * 1e3))
        .collect();
    let detail = format!(
        "slope {:.3} (max 3.5), R^2 {:.3} (min 0.9); {}",
        r.slope,
        r.r2,
        rows.join(" ")
    );
    if r.slope <= 3.5 && r.r2 >= 0.9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn pullback() -> Outcome {
    let g = f2_base();
    let systems: [(&[&str], &[&str]); 5] = [
        (&["z1", "z2", "z3"], &["z1 z2 z3"]),
        (&["z1", "z2"], &["z1 z1 z2"]),
        (&["z1", "z2"], &["z1 z2 a^-1"]),
        (&["z1", "z2", "z3"], &["z1 z2 z3", "z3 b^-1"]),
        (&["z1", "z2"], &["z1 z2 z1"]),
    ];
    let solver = BruteForceSolver {
        radius: 1,
        limit: Some(20),
    };
    let cfg = CanonicalConfig { bound: 2, delta: 0 };
    let (mut instances, mut solutions) = (0, 0);
    for (vars, eqs) in systems {
        let s = EqSystem::new(
            "S",
            g.clone(),
            symbols(vars),
            eqs.iter().map(|e| w(e)).collect(),
        )
        .unwrap();
        let ts = s.triangulate();
        ensure(ts.triangles.len() <= 2, || {
            format!("{eqs:?} has {} triangles", ts.triangles.len())
        })?;
        let insts = generate_instances(&ts, &cfg).map_err(|e| e.to_string())?;
        for inst in &insts {
            instances += 1;
            for phi in solver
                .solve(&inst.system)
                .map_err(|e| e.to_string())?
                .solutions
            {
                let mut full = phi.clone();
                for v in &inst.system.variables {
                    full.entry(v.clone()).or_insert_with(Word::empty);
                }
                match check_pullback(inst, &ts, &s, &full) {
                    Ok(Pullback::Ok(_)) => solutions += 1,
                    Ok(Pullback::Violation(i)) => {
                        return Err(format!("{eqs:?}: equation {i} violated"))
                    }
                    Err(e) => return Err(format!("{eqs:?}: {e}")),
                }
            }
        }
    }
    ensure(solutions > 0, || "no solutions found".into())?;
    Ok(format!(
        "5 systems, {instances} instances, {solutions} solutions pulled back"
    ))
}

fn random_system(rng: &mut StdRng) -> EqSystem {
    let nvars = rng.gen_range(1..=3);
    let names: Vec<String> = (1..=nvars).map(|i| format!("x{i}")).collect();
    let vars: Vec<Symbol> = names.iter().map(|n| Symbol::new(n)).collect();
    let mut alphabet = vars.clone();
    alphabet.extend(symbols(&["a", "b"]));
    let neqs = rng.gen_range(1..=2);
    let eqs = (0..neqs)
        .map(|_| {
            let len = rng.gen_range(2..=6);
            random_word(rng, &alphabet, len)
        })
        .collect();
    EqSystem::new("R", f2_base(), vars, eqs).unwrap()
}

fn triangulation_bijection() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let ab = symbols(&["a", "b"]);
    let oracles = [PermGroup::s3(&ab), PermGroup::d4(&ab)];
    let mut total = 0;
    for k in 0..20 {
        let s = random_system(&mut rng);
        let t = s.triangulate();
        let ts = t.as_system("T").map_err(|e| e.to_string())?;
        for g in &oracles {
            let dom = g.element_words();
            let sols = s.search_domain(g, &dom, None).map_err(|e| e.to_string())?;
            let tsols = ts.search_domain(g, &dom, None).map_err(|e| e.to_string())?;
            let eqs: Vec<String> = s.equations.iter().map(ToString::to_string).collect();
            ensure(sols.len() == tsols.len(), || {
                format!(
                    "system {k} {eqs:?} over {}: {} vs {} solutions",
                    g.order(),
                    sols.len(),
                    tsols.len()
                )
            })?;
            for phi in &sols {
                let ext: Assignment = t.extend_solution(phi);
                ensure(ts.evaluate(&ext, g) == Ok(Evaluation::Satisfied), || {
                    format!("system {k}: extension fails")
                })?;
            }
            for psi in &tsols {
                let back = t.restrict_solution(psi);
                ensure(s.evaluate(&back, g) == Ok(Evaluation::Satisfied), || {
                    format!("system {k}: restriction fails")
                })?;
            }
            total += sols.len();
        }
    }
    Ok(format!(
        "20 systems over S3 and D4, {total} solutions matched"
    ))
}

/// Counts solutions of `word = 1` over S3 by direct permutation arithmetic,
/// independently of the library's search.
fn count_s3(word: &Word, vars: &[Symbol], s3: &PermGroup) -> usize {
    type P = [usize; 3];
    let to_p = |v: Vec<usize>| -> P { [v[0], v[1], v[2]] };
    let elems: Vec<P> = s3
        .element_words()
        .iter()
        .map(|e| to_p(s3.evaluate(e).unwrap()))
        .collect();
    let inv = |p: &P| -> P {
        let mut q = [0; 3];
        for i in 0..3 {
            q[p[i]] = i;
        }
        q
    };
    enum Item {
        Var(usize, bool),
        Const(P),
    }
    let items: Vec<Item> = word
        .letters()
        .iter()
        .map(|l| match vars.iter().position(|v| *v == l.symbol) {
            Some(i) => Item::Var(i, l.inverse),
            None => Item::Const(to_p(s3.evaluate(&Word::letter(l.clone())).unwrap())),
        })
        .collect();
    let inverses: Vec<P> = elems.iter().map(inv).collect();
    let mut idx = vec![0usize; vars.len()];
    let mut count = 0;
    loop {
        let mut p: P = [0, 1, 2];
        for it in &items {
            let g = match it {
                Item::Var(i, false) => &elems[idx[*i]],
                Item::Var(i, true) => &inverses[idx[*i]],
                Item::Const(c) => c,
            };
            p = [g[p[0]], g[p[1]], g[p[2]]];
        }
        if p == [0, 1, 2] {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return count;
            }
            idx[k] += 1;
            if idx[k] < elems.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn random_quadratic(rng: &mut StdRng) -> (Word, Vec<Symbol>) {
    loop {
        let n = rng.gen_range(1..=8);
        let vars: Vec<Symbol> = (1..=n).map(|i| Symbol::new(&format!("v{i}"))).collect();
        let mut slots: Vec<Letter> = vars
            .iter()
            .flat_map(|v| [v.clone(), v.clone()])
            .map(|s| Letter::new(s, rng.gen()))
            .collect();
        slots.shuffle(rng);
        let consts = symbols(&["a", "b"]);
        let mut letters = Vec::new();
        for l in slots {
            if rng.gen_bool(0.4) {
                let len = rng.gen_range(1..=2);
                letters.extend(random_word(rng, &consts, len).into_letters());
            }
            letters.push(l);
        }
        let word = Word::from_letters(letters);
        if vars.iter().all(|v| word.occurrences(v) == 2) {
            return (word, vars);
        }
    }
}

fn quadratic_normalization() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 7);
    let s3 = PermGroup::s3(&symbols(&["a", "b"]));
    let mut checked_solutions = 0;
    for k in 0..50 {
        let (word, vars) = random_quadratic(&mut rng);
        let n =
            to_standard_form(&word, |v| vars.contains(v)).map_err(|e| format!("`{word}`: {e}"))?;
        let lhs = word.substitute_map(&n.automorphism);
        let rhs = n.standard.word().conjugate(&n.conjugator);
        ensure(lhs == rhs, || {
            format!("word {k} `{word}`: w^phi = `{lhs}`, g^-1 s g = `{rhs}`")
        })?;
        let mut svars = n.standard.variables();
        svars.extend(n.standard.free_variables.iter().cloned());
        ensure(svars.len() == vars.len(), || {
            format!(
                "word {k} `{word}`: {} variables after normalization",
                svars.len()
            )
        })?;
        let a = count_s3(&word, &vars, &s3);
        let b = count_s3(&n.standard.word(), &svars, &s3);
        ensure(a == b, || {
            format!(
                "word {k} `{word}` vs `{}`: {a} vs {b} S3 solutions",
                n.standard
            )
        })?;
        checked_solutions += a;
    }
    let mut shapes = 0;
    for orientable in [true, false] {
        for genus in 0..=4 {
            for m in 0..=4 {
                for d in [Word::empty(), w("a b")] {
                    let coeffs = vec![w("a"); m];
                    let q = StandardQuadratic::build(orientable, genus, &coeffs, d.clone());
                    ensure(q.euler_char() == q.euler_char_atoms(), || {
                        format!(
                            "{q}: surface {} vs atoms {}",
                            q.euler_char(),
                            q.euler_char_atoms()
                        )
                    })?;
                    shapes += 1;
                }
            }
        }
    }
    Ok(format!("50 words, {checked_solutions} S3 solutions in bijection; {shapes} shapes agree on euler_char"))
}

fn dehn_completeness() -> Outcome {
    let g = genus_two();
    let gens = symbols(&["a", "b", "c", "d"]);
    let rel = w("[a,b][c,d]");
    let mut rng = StdRng::seed_from_u64(SEED ^ 8);
    for i in 0..100 {
        let k = rng.gen_range(1..=3);
        let mut parts = Vec::new();
        for _ in 0..k {
            let c = {
                let len = rng.gen_range(0..=6);
                random_word(&mut rng, &gens, len)
            };
            let r = rel.rotate(rng.gen_range(0..rel.len()));
            let r = if rng.gen() { r } else { r.inverse() };
            parts.push(r.conjugate(&c));
        }
        let u = Word::product(parts.iter());
        ensure(g.wp(&u).map_err(|e| e.to_string())?, || {
            format!("product {i} `{u}` reported nontrivial")
        })?;
    }
    let mut nontrivial = 0;
    while nontrivial < 100 {
        let u = {
            let len = rng.gen_range(1..=20);
            random_word(&mut rng, &gens, len)
        };
        if g.exponent_vector(&u).iter().all(|&e| e == 0) {
            continue;
        }
        ensure(!g.wp(&u).map_err(|e| e.to_string())?, || {
            format!("`{u}` with nonzero abelianization reported trivial")
        })?;
        nontrivial += 1;
    }
    Ok("100 relator products trivial, 100 abelian-nontrivial words nontrivial".into())
}

fn britton_invariants() -> Outcome {
    let s2 = Tower::new("S2", Arc::new(genus_two()))
        .extend_centralizer(&w("a b"), 1, None)
        .unwrap();
    let towers = [
        f2().extend_centralizer(&w("a"), 1, None).unwrap(),
        height_three(),
        s2,
    ];
    let mut rng = StdRng::seed_from_u64(SEED ^ 9);
    for t in &towers {
        let gens = t.generators();
        let rels = t.relators();
        for i in 0..1000 {
            let u = {
                let len = rng.gen_range(1..=24);
                random_word(&mut rng, &gens, len)
            };
            // A second spelling of the same element: splice in a conjugated relator.
            let mut letters = u.letters().to_vec();
            let at = rng.gen_range(0..=letters.len());
            let c = {
                let len = rng.gen_range(0..=3);
                random_word(&mut rng, &gens, len)
            };
            let r = rels.choose(&mut rng).unwrap().conjugate(&c);
            letters.splice(at..at, r.into_letters());
            let v = Word::from_letters(letters);
            let red = t
                .britton_reduce(&u.mul(&v.inverse()))
                .map_err(|e| e.to_string())?;
            ensure(red.is_empty(), || {
                format!(
                    "{}: word {i} `{u}` times its respelled inverse reduces to `{red}`",
                    t.name()
                )
            })?;
            let ru = t.britton_reduce(&u).map_err(|e| e.to_string())?;
            ensure(t.find_pinch(&ru).is_none(), || {
                format!("{}: reduction of `{u}` still has a pinch", t.name())
            })?;
        }
    }
    Ok("3 towers x 1000 words: w w'^-1 reduces to 1, reductions pinch-free".into())
}

fn pipeline_smoke() -> Outcome {
    let asg = |pairs: &[(&str, &str)]| -> Assignment {
        pairs.iter().map(|(k, v)| (Symbol::new(k), w(v))).collect()
    };
    let f2_g = Arc::new(Presentation::free("F2", symbols(&["x", "y"])).unwrap());
    let z2 = Arc::new(Presentation::new("Z2", symbols(&["x", "y"]), vec![w("[x,y]")]).unwrap());
    let f2z = Arc::new(
        Presentation::new(
            "F2xZ",
            symbols(&["x", "y", "z"]),
            vec![w("[x,z]"), w("[y,z]")],
        )
        .unwrap(),
    );
    let ntq = |level: NtqLevel| NtqSystem::new("N", f2_base(), vec![level]).unwrap();
    let free = || {
        ntq(NtqLevel::Free {
            vars: symbols(&["p", "q"]),
        })
    };
    let abelian = || {
        ntq(NtqLevel::FreeAbelian {
            vars: symbols(&["p", "q"]),
        })
    };
    let cases: Vec<(Arc<Presentation>, Vec<PipelineInput>, Word)> = vec![
        (
            f2_g,
            vec![PipelineInput {
                system: free(),
                rho: asg(&[("x", "p"), ("y", "q")]),
            }],
            w("x y x^-1"),
        ),
        (
            z2,
            vec![PipelineInput {
                system: abelian(),
                rho: asg(&[("x", "p"), ("y", "q")]),
            }],
            w("[x,y]^(x y^-1) [x,y]^-1"),
        ),
        (
            f2z,
            vec![
                PipelineInput {
                    system: free(),
                    rho: asg(&[("x", "p"), ("y", "q"), ("z", "")]),
                },
                PipelineInput {
                    system: abelian(),
                    rho: asg(&[("x", "p"), ("y", ""), ("z", "q")]),
                },
            ],
            w("[x,z]^(y) [y,z]^(x^-1) [x,z]^-1"),
        ),
    ];
    let mut lines = Vec::new();
    for (g, inputs, planted) in cases {
        // For F2 the relator set is empty, so the planted element is a
        // conjugate times its inverse.
        let planted = if g.relators().is_empty() {
            planted.mul(&planted.inverse())
        } else {
            planted
        };
        let results = run_pipeline(&g, &inputs, 2, &EmbedConfig::default());
        let mut ok = 0;
        for r in results {
            let r = r.map_err(|e| format!("{}: {e}", g.name()))?;
            let img = r.phi.apply(&planted);
            ensure(r.phi.target.wp(&img).map_err(|e| e.to_string())?, || {
                format!("{}: planted element survives", g.name())
            })?;
            ok += 1;
        }
        ensure(ok >= 1, || format!("{}: no result", g.name()))?;
        lines.push(format!("{} {ok}", g.name()));
    }
    Ok(format!("results per group: {}", lines.join(", ")))
}

// ---------------------------------------------------------------------------

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "relator soundness",
            budget: secs(10),
            run: relator_soundness,
        },
        Criterion {
            id: 2,
            name: "x^2 y^2 d identity by britton_reduce",
            budget: secs(1),
            run: britton_identity,
        },
        Criterion {
            id: 3,
            name: "injectivity radius 3, form IV",
            budget: secs(60),
            run: || {
                injectivity(NtqLevel::Free {
                    vars: symbols(&["x", "y"]),
                })
            },
        },
        Criterion {
            id: 3,
            name: "injectivity radius 3, form II",
            budget: secs(60),
            run: || {
                injectivity(NtqLevel::CentralizerExt {
                    center_of: w("a"),
                    vars: symbols(&["x"]),
                })
            },
        },
        Criterion {
            id: 3,
            name: "injectivity radius 3, form III",
            budget: secs(60),
            run: || {
                injectivity(NtqLevel::FreeAbelian {
                    vars: symbols(&["x", "y"]),
                })
            },
        },
        Criterion {
            id: 4,
            name: "polynomial-time word problem",
            budget: secs(120),
            run: polynomial_wp,
        },
        Criterion {
            id: 5,
            name: "pullback of reduced instances",
            budget: secs(60),
            run: pullback,
        },
        Criterion {
            id: 6,
            name: "triangulation bijection over S3, D4",
            budget: secs(60),
            run: triangulation_bijection,
        },
        Criterion {
            id: 7,
            name: "quadratic normalization",
            budget: secs(60),
            run: quadratic_normalization,
        },
        Criterion {
            id: 8,
            name: "Dehn algorithm on genus-2 surface group",
            budget: secs(60),
            run: dehn_completeness,
        },
        Criterion {
            id: 9,
            name: "Britton invariants",
            budget: secs(60),
            run: britton_invariants,
        },
        Criterion {
            id: 10,
            name: "pipeline smoke test",
            budget: secs(60),
            run: pipeline_smoke,
        },
    ];
    let mut failed = BTreeMap::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let (tag, detail) = match outcome {
            Ok(d) if took <= c.budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("over budget; {d}")),
            Err(e) => ("FAIL", e),
        };
        if tag == "FAIL" {
            failed.insert(c.id, c.name);
        }
        println!(
            "[{tag}] criterion {:>2}: {} ({:.2}s of {}s) {detail}",
            c.id,
            c.name,
            took.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!(
            "acceptance: {} failing: {:?}",
            failed.len(),
            failed.values().collect::<Vec<_>>()
        );
        std::process::exit(1);
    }
}
