use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use abscompat::algebra::{is_contraction, is_positive, AlgebraElement};
use abscompat::io::{read_element, read_map, to_json, write_element};
use abscompat::preservers::{classify_triple_hom, fuzz_counterexample, is_triple_hom};
use abscompat::relations::{
    check_orth_characterization, check_p00_equivalences, check_tripotent_characterization,
    compat_defect, is_orthogonal, is_partial_isometry, is_projection,
};
use abscompat::suite::{run_suite, SuiteConfig};
use abscompat::{CompatKind, ConsistencyReport, Error, RelationReport, ToleranceConfig};

const EXIT_TRUE: u8 = 0;
const EXIT_FALSE: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_WITNESS: u8 = 3;

#[derive(Parser)]
#[command(name = "abscompat", version, about = "Absolute compatibility checks on finite-dimensional C*-algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Relation {
    Compat,
    Orth,
    Positive,
    Contraction,
    Projection,
    PartialIsometry,
    OrthChar,
    JordanEquiv,
    TripotentChar,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Domain,
    Range,
    Full,
}

impl From<KindArg> for CompatKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Domain => CompatKind::Domain,
            KindArg::Range => CompatKind::Range,
            KindArg::Full => CompatKind::Full,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a relation on one or two element files.
    Check {
        relation: Relation,
        a: PathBuf,
        b: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "full")]
        kind: KindArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the randomized verification suites.
    VerifySuite {
        /// Comma-separated block sizes.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Check that a map is a triple homomorphism and split its blocks.
    Classify {
        map: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Search for a compatible pair whose image is not compatible.
    Fuzz {
        map: PathBuf,
        #[arg(long, value_enum, default_value = "domain")]
        kind: KindArg,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Directory for witness_a.json and witness_b.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn tolerance(tol: f64) -> Result<ToleranceConfig, Error> {
    let t = ToleranceConfig::with_relation(tol);
    t.validate()?;
    Ok(t)
}

fn print_report<T: Serialize>(report: &T, json: bool, text: impl FnOnce() -> String) -> Result<(), Error> {
    if json {
        println!("{}", to_json(report)?);
    } else {
        println!("{}", text());
    }
    Ok(())
}

fn relation_text(r: &RelationReport) -> String {
    let mut s = format!(
        "relation: {}\nverdict: {}\ndefect: {:.6e}\ntolerance: {:.1e}",
        r.relation_name, r.verdict, r.defect, r.tolerance_used
    );
    if let Some(c) = &r.cross_check {
        s.push_str(&format!(
            "\ncross-check ({}): verdict {}, defect {:.6e}, agrees {}",
            c.relation, c.verdict, c.defect, c.agrees
        ));
    }
    s
}

fn consistency_text(r: &ConsistencyReport) -> String {
    let mut s = format!("relation: {}\n", r.name);
    for c in &r.clauses {
        s.push_str(&format!("clause {}: {:?}\n", c.clause, c.status));
        for side in &c.sides {
            s.push_str(&format!(
                "  {:<28} verdict {:<5} defect {:.6e}\n",
                side.label, side.verdict, side.defect
            ));
        }
    }
    s.push_str(&format!(
        "consistent: {}\nindeterminate: {}",
        r.consistent, r.indeterminate
    ));
    s
}

fn second(b: &Option<PathBuf>) -> Result<AlgebraElement, Error> {
    let path = b
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("this relation needs two element files".into()))?;
    read_element(path)
}

fn check(relation: Relation, a: &Path, b: &Option<PathBuf>, kind: CompatKind, tol: f64, json: bool) -> Result<u8, Error> {
    let tol = tolerance(tol)?;
    let a = read_element(a)?;
    let single = |r: RelationReport| -> Result<u8, Error> {
        print_report(&r, json, || relation_text(&r))?;
        Ok(if r.verdict { EXIT_TRUE } else { EXIT_FALSE })
    };
    let consistency = |r: ConsistencyReport| -> Result<u8, Error> {
        print_report(&r, json, || consistency_text(&r))?;
        Ok(if r.consistent { EXIT_TRUE } else { EXIT_FALSE })
    };
    match relation {
        Relation::Compat => single(compat_defect(&a, &second(b)?, kind, &tol)?),
        Relation::Orth => single(is_orthogonal(&a, &second(b)?, &tol)?),
        Relation::Positive => single(is_positive(&a, &tol)?),
        Relation::Contraction => single(is_contraction(&a, &tol)?),
        Relation::Projection => single(is_projection(&a, &tol)?),
        Relation::PartialIsometry => single(is_partial_isometry(&a, &tol)?),
        Relation::OrthChar => consistency(check_orth_characterization(&a, &second(b)?, &tol)?),
        Relation::JordanEquiv => consistency(check_p00_equivalences(&a, &second(b)?, &tol)?),
        Relation::TripotentChar => consistency(check_tripotent_characterization(&a, &tol)?),
    }
}

fn verify_suite(dims: Vec<usize>, trials: usize, seed: u64, tol: f64, json: bool) -> Result<u8, Error> {
    let cfg = SuiteConfig {
        dims,
        trials,
        seed,
        tol: tolerance(tol)?,
    };
    let summary = run_suite(&cfg)?;
    print_report(&summary, json, || summary.to_string())?;
    Ok(if summary.all_passed() { EXIT_TRUE } else { EXIT_FALSE })
}

fn classify(map: &Path, tol: f64, json: bool) -> Result<u8, Error> {
    let tol = tolerance(tol)?;
    let map = read_map(map, &tol)?;
    match classify_triple_hom(&map, &tol) {
        Ok(c) => {
            print_report(&c, json, || {
                format!(
                    "triple hom: true (defect {:.6e})\nT(1) partial isometry: true (defect {:.6e})\nI (homomorphic blocks): {:?}\nJ (anti-homomorphic blocks): {:?}",
                    c.triple_hom_defect,
                    c.partial_isometry_defect,
                    c.hom_block_indices,
                    c.antihom_block_indices
                )
            })?;
            Ok(EXIT_TRUE)
        }
        Err(e @ (Error::NotTripleHom { .. } | Error::AmbiguousBlock { .. })) => {
            let th = is_triple_hom(&map, &tol)?;
            let unit = map.apply(&AlgebraElement::unit(map.domain()))?;
            let pi = is_partial_isometry(&unit, &tol)?;
            #[derive(Serialize)]
            struct Failure {
                error: String,
                triple_hom: RelationReport,
                unit_image_partial_isometry: RelationReport,
            }
            let f = Failure {
                error: e.to_string(),
                triple_hom: th,
                unit_image_partial_isometry: pi,
            };
            print_report(&f, json, || {
                format!(
                    "triple hom: {} (defect {:.6e})\nT(1) partial isometry: {} (defect {:.6e})\n{}",
                    f.triple_hom.verdict,
                    f.triple_hom.defect,
                    f.unit_image_partial_isometry.verdict,
                    f.unit_image_partial_isometry.defect,
                    f.error
                )
            })?;
            Ok(EXIT_FALSE)
        }
        Err(e) => Err(e),
    }
}

fn fuzz(map: &Path, kind: CompatKind, budget: usize, seed: u64, tol: f64, out: &Path) -> Result<u8, Error> {
    let tol = tolerance(tol)?;
    let map = read_map(map, &tol)?;
    match fuzz_counterexample(&map, kind, budget, seed, &tol)? {
        Some(w) => {
            let (pa, pb) = (out.join("witness_a.json"), out.join("witness_b.json"));
            write_element(&pa, &w.a)?;
            write_element(&pb, &w.b)?;
            println!(
                "witness found at candidate {} ({})\ninput defect: {:.6e}\noutput defect: {:.6e}{}\nwrote {} and {}",
                w.index,
                w.source,
                w.input_defect,
                w.output_defect,
                if w.image_not_contractive { " (image not contractive)" } else { "" },
                pa.display(),
                pb.display()
            );
            Ok(EXIT_WITNESS)
        }
        None => {
            println!("no witness within {budget} candidates");
            Ok(EXIT_TRUE)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_TRUE });
        }
    };
    let result = match cli.command {
        Command::Check {
            relation,
            a,
            b,
            kind,
            tol,
            json,
        } => check(relation, &a, &b, kind.into(), tol, json),
        Command::VerifySuite {
            dims,
            trials,
            seed,
            tol,
            json,
        } => verify_suite(dims, trials, seed, tol, json),
        Command::Classify { map, tol, json } => classify(&map, tol, json),
        Command::Fuzz {
            map,
            kind,
            budget,
            seed,
            tol,
            out,
        } => fuzz(&map, kind.into(), budget, seed, tol, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
