//! The `ectower` command line: argument parsing, file loading, reports and
//! the word-problem benchmark.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::canonical::{generate_instances, CanonicalConfig};
use crate::embeddings::{embed_ntq, EmbedConfig};
use crate::equations::EqSystem;
use crate::error::{Error, Result};
use crate::finite::PermGroup;
use crate::formats::{self, HomSpec};
use crate::group::Group;
use crate::presentation::Presentation;
use crate::quadratic::to_standard_form;
use crate::tower::{GroupHom, Injectivity, SourceGroup, Tower, DEFAULT_SEARCH_BOUND};
use crate::word::{random_word, Word};

/// Environment variable overriding the default search bound.
pub const BOUND_ENV: &str = "GT_DEFAULT_BOUND";

#[derive(Parser, Debug)]
#[command(
    name = "ectower",
    version,
    about = "Centralizer-extension towers, equations and embeddings"
)]
pub struct Cli {
    /// Search bound for bounded conjugacy and centralizer searches
    /// (default: $GT_DEFAULT_BOUND, else 2).
    #[arg(long, global = true)]
    pub bound: Option<usize>,
    /// Seed for randomized generation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct Target {
    /// A group file.
    #[arg(long)]
    pub group: Option<PathBuf>,
    /// A tower file.
    #[arg(long)]
    pub tower: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Finite {
    S3,
    D4,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BenchKind {
    Wp,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether a word is trivial.
    Wp {
        #[command(flatten)]
        target: Target,
        word: String,
    },
    /// Print the Dehn (group) or Britton (tower) reduction of a word.
    Reduce {
        #[command(flatten)]
        target: Target,
        word: String,
    },
    /// Split a system into triangles.
    Triangulate {
        #[arg(long)]
        system: PathBuf,
    },
    /// Standard forms of the equations of a quadratic system.
    Quad {
        #[arg(long)]
        system: PathBuf,
    },
    /// Reduced instances over the free group.
    Canonical {
        #[arg(long)]
        system: PathBuf,
        /// Group used when the system refers to its group by name.
        #[arg(long)]
        group: Option<PathBuf>,
        /// Length bound for the constant triples.
        #[arg(long = "length", default_value_t = 2)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        delta: u32,
        #[arg(long)]
        emit_dir: Option<PathBuf>,
        #[arg(long = "report-L")]
        report_l: bool,
    },
    /// Embed an NTQ system into a tower.
    Embed {
        #[arg(long)]
        ntq: PathBuf,
        #[arg(long)]
        out_tower: Option<PathBuf>,
        #[arg(long)]
        out_hom: Option<PathBuf>,
        #[arg(long)]
        verify_radius: Option<usize>,
        #[arg(long, default_value_t = 2)]
        solution_radius: usize,
    },
    /// Check that a homomorphism kills the source relators.
    VerifyHom {
        #[arg(long)]
        hom: PathBuf,
        /// Group or tower file of the source.
        #[arg(long)]
        source: PathBuf,
        /// Group or tower file of the target.
        #[arg(long)]
        target: PathBuf,
        /// Also sample injectivity on the ball of this radius.
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Enumerate solutions of a system within a radius.
    HomSearch {
        #[arg(long)]
        system: PathBuf,
        /// Search over a finite group instead of the system's group.
        #[arg(long, value_enum)]
        finite: Option<Finite>,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Time the word problem on random words of growing length.
    Bench {
        #[arg(value_enum)]
        kind: BenchKind,
        #[arg(long)]
        tower: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "100,200,400,800,1600")]
        lengths: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
}

/// The default search bound, honouring [`BOUND_ENV`].
pub fn default_bound() -> usize {
    std::env::var(BOUND_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SEARCH_BOUND)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read `{}`: {e}", path.display())))
}

/// Resolves group references relative to the directory of `from`.
fn resolver(from: &Path) -> impl Fn(&str) -> Result<Presentation> + '_ {
    move |name: &str| {
        let p = from.parent().unwrap_or(Path::new(".")).join(name);
        formats::parse_group(&read(&p)?)
    }
}

pub fn load_group(path: &Path) -> Result<Presentation> {
    formats::parse_group(&read(path)?)
}

pub fn load_tower(path: &Path, bound: usize) -> Result<Tower> {
    let t = formats::parse_tower(&read(path)?, &resolver(path))?;
    Ok(t.with_search_bound(bound))
}

/// A group or tower file, chosen by its leading keyword.
fn load_any(path: &Path, bound: usize) -> Result<Tower> {
    let src = read(path)?;
    if src.trim_start().starts_with("tower") {
        Ok(formats::parse_tower(&src, &resolver(path))?.with_search_bound(bound))
    } else {
        let g = formats::parse_group(&src)?;
        let name = g.name().to_string();
        Ok(Tower::new(&name, Arc::new(g)).with_search_bound(bound))
    }
}

fn load_system(path: &Path, group: Option<&Path>) -> Result<EqSystem> {
    let src = read(path)?;
    match group {
        Some(g) => {
            let g = load_group(g)?;
            formats::parse_system(&src, &|_| Ok(g.clone()))
        }
        None => formats::parse_system(&src, &resolver(path)),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::Invalid(format!("cannot write `{}`: {e}", path.display())))
}

/// Least-squares fit of `log t = slope * log n + c`, returning the slope
/// and the coefficient of determination.
pub fn loglog_fit(points: &[(usize, f64)]) -> (f64, f64) {
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.max(1e-12).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    (slope, r2)
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    /// Word length and median seconds per word-problem call.
    pub rows: Vec<(usize, f64)>,
    pub slope: f64,
    pub r2: f64,
}

/// Times `tower.wp` on `reps` random words per length and fits a log-log
/// slope to the medians.
pub fn bench_wp(tower: &Tower, lengths: &[usize], reps: usize, seed: u64) -> Result<BenchReport> {
    if lengths.len() < 2 {
        return Err(Error::Invalid(
            "at least two lengths are needed for a fit".into(),
        ));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let gens = tower.generators();
    let mut rows = Vec::new();
    for &len in lengths {
        let mut times = Vec::with_capacity(reps.max(1));
        for _ in 0..reps.max(1) {
            let w = random_word(&mut rng, &gens, len);
            let start = Instant::now();
            tower.wp(&w)?;
            times.push(start.elapsed().as_secs_f64());
        }
        times.sort_by(|a, b| a.total_cmp(b));
        rows.push((len, times[times.len() / 2]));
    }
    let (slope, r2) = loglog_fit(&rows);
    Ok(BenchReport { rows, slope, r2 })
}

fn header(cmd: &str, bound: usize, seed: u64, extra: &str) -> String {
    let mut s = format!("# ectower {cmd} bound={bound} seed={seed}");
    if !extra.is_empty() {
        s.push(' ');
        s.push_str(extra);
    }
    s.push('\n');
    s
}

fn execute(cli: &Cli) -> Result<String> {
    let bound = cli.bound.unwrap_or_else(default_bound);
    let seed = cli.seed;
    let mut out = String::new();
    match &cli.command {
        Command::Wp { target, word } | Command::Reduce { target, word } => {
            let is_wp = matches!(cli.command, Command::Wp { .. });
            out += &header(if is_wp { "wp" } else { "reduce" }, bound, seed, "");
            let w = Word::parse(word)?;
            if let Some(g) = &target.group {
                let g = load_group(g)?;
                g.alphabet().check(&w)?;
                if is_wp {
                    out += if g.wp(&w)? {
                        "trivial\n"
                    } else {
                        "nontrivial\n"
                    };
                } else {
                    g.wp(&w)?;
                    let _ = writeln!(out, "{}", g.dehn_reduce(&w));
                }
            } else if let Some(t) = &target.tower {
                let t = load_tower(t, bound)?;
                t.alphabet().check(&w)?;
                if is_wp {
                    out += if t.wp(&w)? {
                        "trivial\n"
                    } else {
                        "nontrivial\n"
                    };
                } else {
                    let _ = writeln!(out, "{}", t.britton_reduce(&w)?);
                }
            }
        }
        Command::Triangulate { system } => {
            out += &header("triangulate", bound, seed, "");
            let s = load_system(system, None)?;
            let ts = s.triangulate();
            for (v, w) in &ts.log {
                let _ = writeln!(out, "# {v} = {w}");
            }
            out += &formats::write_system(&ts.as_system(&format!("{}_tri", s.name))?);
        }
        Command::Quad { system } => {
            out += &header("quad", bound, seed, "");
            let s = load_system(system, None)?;
            for (i, e) in s.equations.iter().enumerate() {
                let n = to_standard_form(e, |v| s.is_variable(v))?;
                let q = &n.standard;
                let auto: Vec<String> = n
                    .automorphism
                    .iter()
                    .map(|(k, v)| format!("{k} -> {v}"))
                    .collect();
                let _ = writeln!(out, "standard_form {} {{", i + 1);
                let _ = writeln!(out, "  equation: {q};");
                let _ = writeln!(out, "  orientable: {};", q.orientable());
                let _ = writeln!(out, "  genus: {};", q.genus());
                let _ = writeln!(out, "  punctures: {};", q.punctures());
                let _ = writeln!(out, "  euler_char: {};", q.euler_char());
                let _ = writeln!(out, "  automorphism: {};", auto.join(", "));
                let _ = writeln!(out, "  conjugator: {};", n.conjugator);
                let free: Vec<String> = q.free_variables.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "  free_variables: {};", free.join(", "));
                out += "}\n";
            }
        }
        Command::Canonical {
            system,
            group,
            length,
            delta,
            emit_dir,
            report_l,
        } => {
            out += &header(
                "canonical",
                bound,
                seed,
                &format!("length={length} delta={delta}"),
            );
            let s = load_system(system, group.as_deref())?;
            let ts = s.triangulate();
            let cfg = CanonicalConfig {
                bound: *length,
                delta: *delta,
            };
            if *report_l {
                let l = cfg.theoretical_l(&ts);
                let _ = writeln!(
                    out,
                    "theoretical_L: {l} (about 10^{:.1})",
                    l.approx_decimal_digits()
                );
            }
            let insts = generate_instances(&ts, &cfg)?;
            let _ = writeln!(out, "instances: {}", insts.len());
            for (i, inst) in insts.iter().enumerate() {
                let eqs: Vec<String> = inst
                    .system
                    .equations
                    .iter()
                    .map(ToString::to_string)
                    .collect();
                let _ = writeln!(out, "instance {i}: {}", eqs.join(", "));
                if let Some(dir) = emit_dir {
                    std::fs::create_dir_all(dir).map_err(|e| {
                        Error::Invalid(format!("cannot create `{}`: {e}", dir.display()))
                    })?;
                    let mut sys = inst.system.clone();
                    sys.name = format!("inst_{i}");
                    write_file(
                        &dir.join(format!("inst_{i}.sys")),
                        &formats::write_system(&sys),
                    )?;
                    let hom = HomSpec {
                        source: format!("{}_tri", s.name),
                        target: sys.name.clone(),
                        map: inst.rho.clone(),
                    };
                    write_file(
                        &dir.join(format!("inst_{i}.hom")),
                        &formats::write_hom(&hom),
                    )?;
                }
            }
        }
        Command::Embed {
            ntq,
            out_tower,
            out_hom,
            verify_radius,
            solution_radius,
        } => {
            let extra = format!(
                "solution_radius={solution_radius} verify_radius={}",
                verify_radius.map_or("none".to_string(), |r| r.to_string())
            );
            out += &header("embed", bound, seed, &extra);
            let sys = formats::parse_ntq(&read(ntq)?, &resolver(ntq))?;
            let cfg = EmbedConfig {
                solution_radius: *solution_radius,
                verify_radius: *verify_radius,
                ..Default::default()
            };
            let mut r = embed_ntq(&sys, bound, &cfg)?;
            for (i, cases) in r.case_trace.iter().enumerate() {
                let names: Vec<String> = cases.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "level {i}: {}", names.join("; "));
            }
            let _ = writeln!(out, "status: relators_verified");
            if let Some(radius) = verify_radius {
                out += &injectivity_line(&mut r.hom, *radius)?;
            }
            out += &formats::write_tower(&r.tower);
            out += &formats::write_hom(&HomSpec::from(&r.hom));
            if let Some(p) = out_tower {
                write_file(p, &formats::write_tower(&r.tower))?;
            }
            if let Some(p) = out_hom {
                write_file(p, &formats::write_hom(&HomSpec::from(&r.hom)))?;
            }
        }
        Command::VerifyHom {
            hom,
            source,
            target,
            radius,
        } => {
            let extra = format!(
                "radius={}",
                radius.map_or("none".to_string(), |r| r.to_string())
            );
            out += &header("verify-hom", bound, seed, &extra);
            let spec = formats::parse_hom(&read(hom)?)?;
            let src = load_any(source, bound)?;
            let src = if src.height() == 0 {
                SourceGroup::Presentation(src.base().clone())
            } else {
                SourceGroup::Tower(Arc::new(src))
            };
            let tgt = Arc::new(load_any(target, bound)?);
            let mut h = GroupHom::new(src, tgt, spec.map)?;
            h.verify()?;
            let _ = writeln!(out, "status: relators_verified");
            if let Some(radius) = radius {
                out += &injectivity_line(&mut h, *radius)?;
            }
        }
        Command::HomSearch {
            system,
            finite,
            radius,
            limit,
        } => {
            let extra = format!(
                "radius={radius} limit={}",
                limit.map_or("none".to_string(), |l| l.to_string())
            );
            out += &header("hom-search", bound, seed, &extra);
            let s = load_system(system, None)?;
            let sols = match finite {
                Some(f) => {
                    let gens = s.group.generators().to_vec();
                    if gens.len() != 2 {
                        return Err(Error::Invalid(
                            "finite targets need a two-generator group".into(),
                        ));
                    }
                    let g = match f {
                        Finite::S3 => PermGroup::s3(&gens),
                        Finite::D4 => PermGroup::d4(&gens),
                    };
                    s.search_domain(&g, &g.element_words(), *limit)?
                }
                None => s.hom_search(&*s.group, *radius, *limit)?,
            };
            let _ = writeln!(out, "solutions: {}", sols.len());
            for phi in &sols {
                let parts: Vec<String> = phi.iter().map(|(k, v)| format!("{k} -> {v}")).collect();
                let _ = writeln!(out, "{}", parts.join(", "));
            }
        }
        Command::Bench {
            kind: BenchKind::Wp,
            tower,
            lengths,
            reps,
        } => {
            out += &header("bench wp", bound, seed, &format!("reps={reps}"));
            let t = load_tower(tower, bound)?;
            let r = bench_wp(&t, lengths, *reps, seed)?;
            out += "length\tseconds\n";
            for (n, s) in &r.rows {
                let _ = writeln!(out, "{n}\t{s:.6e}");
            }
            let _ = writeln!(out, "slope: {:.3}\nr2: {:.3}", r.slope, r.r2);
        }
    }
    Ok(out)
}

fn injectivity_line(h: &mut GroupHom, radius: usize) -> Result<String> {
    if !h.source.has_decidable_wp() {
        return Ok(format!(
            "injectivity: skipped, source `{}` has no decidable word problem (radius {radius})\n",
            h.source.name()
        ));
    }
    Ok(match h.injectivity_sample(radius)? {
        Injectivity::Pass { elements } => {
            format!("injectivity: pass ({elements} elements, radius {radius})\n")
        }
        Injectivity::Counterexample(u, v) => {
            format!("injectivity: collision `{u}` = `{v}` (radius {radius})\n")
        }
    })
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("ectower").chain(args.iter().copied()),
            &mut o,
            &mut e,
        );
        (
            code,
            String::from_utf8(o).unwrap(),
            String::from_utf8(e).unwrap(),
        )
    }

    fn temp(name: &str, text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("ectower-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn wp_free_group() {
        let g = temp("F2.grp", "group F2 { generators: a, b; relators: ; }");
        let (code, out, _) = call(&["wp", "--group", g.to_str().unwrap(), "a a^-1"]);
        assert_eq!(code, 0);
        assert!(out.ends_with("trivial\n") && !out.contains("nontrivial"));
        assert!(out.starts_with("# ectower wp bound="));
    }

    #[test]
    fn malformed_group_exits_2() {
        let g = temp("bad.grp", "group G {\n generators: a;\n relators: a^;\n}");
        let (code, _, err) = call(&["wp", "--group", g.to_str().unwrap(), "a"]);
        assert_eq!(code, 2);
        assert!(err.contains("3:"), "{err}");
    }

    #[test]
    fn regular_ntq_exits_3() {
        let n = temp("reg.ntq", "ntq R { base: group F2 { generators: a, b; relators: ; }; level { form: I; equation: [x,y][p,q]; } }");
        let (code, _, err) = call(&["embed", "--ntq", n.to_str().unwrap()]);
        assert_eq!(code, 3);
        assert!(err.contains("Theorem 4.1"));
    }

    #[test]
    fn fit_recovers_slope() {
        let pts: Vec<(usize, f64)> = [100, 200, 400, 800]
            .iter()
            .map(|&n| (n, (n as f64).powi(2) * 1e-9))
            .collect();
        let (s, r2) = loglog_fit(&pts);
        assert!((s - 2.0).abs() < 1e-9 && (r2 - 1.0).abs() < 1e-9);
    }
}
