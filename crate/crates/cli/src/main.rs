//! Command-line surface over the engine crate.
//!
//! Every subcommand wraps one library operation: load the referenced
//! files, run the operation, and emit a report.  With `--format text`
//! (the default) human-readable lines go to standard output.  With
//! `--format records` line-delimited JSON records with stable keys go to
//! standard output and the human lines move to standard error, so shell
//! pipelines can consume the records while a person still sees progress.
//!
//! Exit codes: 0 on success (and on checks that pass), 2 when a
//! hypothesis or checked property fails, 3 on malformed input or usage,
//! 4 when an internally produced witness fails its own re-verification.
//! The polynomial degree cap honors the `SLINFTY_POLY_DEGREE_CAP`
//! environment variable.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use slinfty::cells::{rectify, solve_ivp};
use slinfty::complexes::{verify_gm_hypotheses, FilteredComplex};
use slinfty::engine::{
    check_twisted_quasi_iso, homotopy_group_dimension, pi0_preimage_with, pi0_separate,
    pi0_trivialize, EngineVariant, GMContext, StepPolicy,
};
use slinfty::format::{
    load_algebra, load_cell, load_element, load_morphism, serialize_algebra, serialize_cell,
    serialize_element, serialize_path,
};
use slinfty::generator::run_fuzz_case;
use slinfty::report::{
    cell_record, cohomology_records, element_record, homotopy_record, hypothesis_records,
    page_records, path_records, spectral_records, trace_records, twisted_check_records,
    validate_morphism_records, validate_structure_records, Record,
};
use slinfty::space::PolyElement;
use slinfty::{Error, Result};

#[derive(Parser)]
#[command(
    name = "slinfty",
    version,
    about = "Exact computations in finite, filtered shifted homotopy Lie algebras"
)]
struct Cli {
    /// Output format: human text, or JSON records on stdout with the
    /// human text on stderr
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Standard,
    Abelian,
}

impl VariantArg {
    fn engine(self) -> EngineVariant {
        match self {
            VariantArg::Standard => EngineVariant::Standard,
            VariantArg::Abelian => EngineVariant::Abelian,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Default,
    ShallowAtBoundary,
}

impl PolicyArg {
    fn engine(self) -> StepPolicy {
        match self {
            PolicyArg::Default => StepPolicy::Default,
            PolicyArg::ShallowAtBoundary => StepPolicy::ShallowAtBoundary,
        }
    }
}

#[derive(Args)]
struct AlgebraArg {
    /// Algebra file
    #[arg(long, short = 'a', value_name = "FILE")]
    algebra: PathBuf,
}

#[derive(Args)]
struct ContextArgs {
    /// Morphism file
    #[arg(long, short = 'm', value_name = "FILE")]
    morphism: PathBuf,
    /// Page gap of the descent hypotheses
    #[arg(long)]
    r: i64,
    /// Engine variant
    #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
    variant: VariantArg,
}

#[derive(Subcommand)]
enum Command {
    /// Check the defining relations of an algebra or morphism file
    Validate {
        /// Algebra (.alg) or morphism (.mor) file
        file: PathBuf,
    },
    /// Run the descent hypothesis battery for a morphism
    Hypotheses {
        #[command(flatten)]
        ctx: ContextArgs,
    },
    /// Curvature of an element
    Curv {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Element file
        #[arg(long, short = 'e', value_name = "FILE")]
        element: PathBuf,
    },
    /// Check whether an element satisfies the flatness equation
    McCheck {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Element file
        #[arg(long, short = 'e', value_name = "FILE")]
        element: PathBuf,
    },
    /// Twist a structure by a flat degree-0 element
    Twist {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Twisting element file
        #[arg(long, short = 'e', value_name = "FILE")]
        element: PathBuf,
        /// Write the twisted algebra here instead of stdout
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Cohomology of a filtration quotient in one degree
    Cohomology {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Quotient levels: lower upper
        #[arg(long, num_args = 2, value_names = ["LOWER", "UPPER"])]
        quotient: Vec<i64>,
        /// Cohomological degree
        #[arg(long)]
        deg: i64,
    },
    /// One spectral entry of the filtration
    Spectral {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Page index
        #[arg(long)]
        page: i64,
        /// Filtration column
        #[arg(long)]
        col: i64,
        /// Cohomological degree
        #[arg(long)]
        deg: i64,
    },
    /// Check the page-vanishing condition at a given gap
    PageVanishing {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Page gap
        #[arg(long)]
        r: i64,
    },
    /// Solve the flat transport equation from a start point
    Ivp {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Start element file (flat)
        #[arg(long, value_name = "FILE")]
        start: PathBuf,
        /// Transport generator element file (degree -1)
        #[arg(long, value_name = "FILE")]
        generator: PathBuf,
        /// Write the solution cell here
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Straighten a flat cell to constant speed
    Rectify {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Cell file
        #[arg(long, short = 'c', value_name = "FILE")]
        cell: PathBuf,
        /// Write the straightened cell here
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Lift a flat target element to a flat source element
    Pi0Preimage {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Target element file
        #[arg(long, value_name = "FILE")]
        target: PathBuf,
        /// Boundary-stage construction
        #[arg(long, value_enum, default_value_t = PolicyArg::Default)]
        policy: PolicyArg,
        /// Write the lifted element here
        #[arg(long, value_name = "FILE")]
        out_element: Option<PathBuf>,
        /// Write the connecting target-side path here
        #[arg(long, value_name = "FILE")]
        out_path: Option<PathBuf>,
    },
    /// Contract a flat source element whose image bounds
    Pi0Trivialize {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Source element file
        #[arg(long, short = 'e', value_name = "FILE")]
        element: PathBuf,
        /// Witness cell file (target side, from zero to the image)
        #[arg(long, short = 'c', value_name = "FILE")]
        cell: PathBuf,
        /// Write the contracting source-side path here
        #[arg(long, value_name = "FILE")]
        out_path: Option<PathBuf>,
    },
    /// Connect two flat source elements whose images are connected
    Pi0Separate {
        #[command(flatten)]
        ctx: ContextArgs,
        /// First source element file
        #[arg(long, value_name = "FILE")]
        a1: PathBuf,
        /// Second source element file
        #[arg(long, value_name = "FILE")]
        a2: PathBuf,
        /// Witness cell file (target side, between the images)
        #[arg(long, short = 'c', value_name = "FILE")]
        cell: PathBuf,
        /// Write the connecting source-side path here
        #[arg(long, value_name = "FILE")]
        out_path: Option<PathBuf>,
    },
    /// Compare twisted cohomology dimensions across the morphism
    PinDims {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Flat base point file (source side)
        #[arg(long, value_name = "FILE")]
        tau: PathBuf,
        /// Connecting level (degree 1 - n is compared)
        #[arg(long)]
        n: i64,
        /// Also check page vanishing of the twisted mapping cone
        #[arg(long)]
        twisted: bool,
    },
    /// Generate seeded random instances and run end-to-end checks
    Fuzz {
        /// Seed for the instance stream
        #[arg(long)]
        seed: u64,
        /// Number of cases to run
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// First case index
        #[arg(long, default_value_t = 0)]
        start: usize,
    },
}

struct Reporter {
    format: Format,
}

impl Reporter {
    fn emit(&self, record: &Record) {
        match self.format {
            Format::Text => println!("{}", record.text()),
            Format::Records => {
                println!("{}", record.json());
                eprintln!("{}", record.text());
            }
        }
    }

    fn emit_all(&self, records: &[Record]) {
        for r in records {
            self.emit(r);
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn pass_fail(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let out = Reporter { format: cli.format };
    match cli.command {
        Command::Validate { file } => {
            let is_morphism = file.extension().is_some_and(|e| e == "mor");
            let records = if is_morphism {
                let mf = load_morphism(&file)?;
                let mut records = validate_structure_records(&mf.morphism.source);
                records.extend(validate_structure_records(&mf.morphism.target));
                records.extend(validate_morphism_records(&mf.morphism));
                records
            } else {
                let l = load_algebra(&file)?;
                validate_structure_records(&l)
            };
            let clean = records.iter().all(|r| match r {
                Record::Validate { ok, .. } => *ok,
                _ => true,
            });
            out.emit_all(&records);
            if clean {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
        Command::Hypotheses { ctx } => {
            let mf = load_morphism(&ctx.morphism)?;
            let report = verify_gm_hypotheses(
                &mf.morphism,
                ctx.r,
                ctx.variant.engine().hypothesis_variant(),
            )?;
            out.emit_all(&hypothesis_records(&report));
            Ok(pass_fail(report.satisfied))
        }
        Command::Curv { algebra, element } => {
            let l = load_algebra(&algebra.algebra)?;
            let x = load_element(&element, &l.space)?;
            let curv = l.curvature(&x)?;
            out.emit(&element_record("curvature", &curv));
            Ok(ExitCode::SUCCESS)
        }
        Command::McCheck { algebra, element } => {
            let l = load_algebra(&algebra.algebra)?;
            let x = load_element(&element, &l.space)?;
            let curv = l.curvature(&x)?;
            let is_mc = curv.is_zero();
            out.emit(&Record::Mc {
                is_mc,
                curvature_weight: curv.weight(),
            });
            Ok(pass_fail(is_mc))
        }
        Command::Twist {
            algebra,
            element,
            out: out_file,
        } => {
            let l = load_algebra(&algebra.algebra)?;
            let tau = load_element(&element, &l.space)?;
            let twisted = l.twist(&tau)?;
            let text = serialize_algebra(&twisted)?;
            match out_file {
                Some(path) => {
                    write_file(&path, &text)?;
                    out.emit_all(&validate_structure_records(&twisted));
                    out.emit(&Record::Outcome {
                        op: "twist".into(),
                        ok: true,
                        detail: format!("twisted algebra written to {}", path.display()),
                    });
                }
                None => {
                    if cli.format == Format::Records {
                        return Err(Error::input(
                            "twist with --format records needs --out (stdout carries the records)",
                        ));
                    }
                    print!("{text}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cohomology {
            algebra,
            quotient,
            deg,
        } => {
            let l = load_algebra(&algebra.algebra)?;
            let complex = FilteredComplex::from_structure(&l);
            let q = complex.quotient_cohomology(quotient[0], quotient[1], deg);
            out.emit_all(&cohomology_records(&q, &l.space));
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectral {
            algebra,
            page,
            col,
            deg,
        } => {
            let l = load_algebra(&algebra.algebra)?;
            let complex = FilteredComplex::from_structure(&l);
            let entry = complex.spectral_entry(page, col, deg)?;
            out.emit_all(&spectral_records(&entry, &l.space));
            Ok(ExitCode::SUCCESS)
        }
        Command::PageVanishing { algebra, r } => {
            let l = load_algebra(&algebra.algebra)?;
            let complex = FilteredComplex::from_structure(&l);
            let p = complex.check_page_vanishing(r)?;
            out.emit_all(&page_records(&l.space.name, &p));
            Ok(pass_fail(p.vanishes))
        }
        Command::Ivp {
            algebra,
            start,
            generator,
            out: out_file,
        } => {
            let l = load_algebra(&algebra.algebra)?;
            let m0 = load_element(&start, &l.space)?;
            let gen = load_element(&generator, &l.space)?;
            let cell = solve_ivp(&l, &m0, &PolyElement::from_element(&gen))?;
            if !cell.is_flat(&l)? {
                return Err(Error::audit("ivp", "solution cell is not flat"));
            }
            out.emit(&cell_record("solution", &cell));
            if let Some(path) = out_file {
                write_file(&path, &serialize_cell(&cell)?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Rectify {
            algebra,
            cell,
            out: out_file,
        } => {
            let l = load_algebra(&algebra.algebra)?;
            let gamma = load_cell(&cell, &l.space)?;
            let straightened = rectify(&l, &gamma)?;
            out.emit(&cell_record("rectified", &straightened));
            if let Some(path) = out_file {
                write_file(&path, &serialize_cell(&straightened)?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Pi0Preimage {
            ctx,
            target,
            policy,
            out_element,
            out_path,
        } => {
            let mf = load_morphism(&ctx.morphism)?;
            let u = mf.morphism;
            let engine_ctx = GMContext::new(&u, ctx.r, ctx.variant.engine())?;
            let b = load_element(&target, &u.target.space)?;
            let (a, trace, path) = pi0_preimage_with(&engine_ctx, &b, policy.engine())?;
            out.emit_all(&trace_records(&trace.steps));
            out.emit(&element_record("preimage", &a));
            out.emit_all(&path_records(&path, &u.target.space));
            if let Some(p) = out_element {
                write_file(&p, &serialize_element(&a)?)?;
            }
            if let Some(p) = out_path {
                write_file(&p, &serialize_path(&path, &u.target.space)?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Pi0Trivialize {
            ctx,
            element,
            cell,
            out_path,
        } => {
            let mf = load_morphism(&ctx.morphism)?;
            let u = mf.morphism;
            let engine_ctx = GMContext::new(&u, ctx.r, ctx.variant.engine())?;
            let a = load_element(&element, &u.source.space)?;
            let gamma = load_cell(&cell, &u.target.space)?;
            let (trace, path) = pi0_trivialize(&engine_ctx, &a, &gamma)?;
            out.emit_all(&trace_records(&trace.steps));
            out.emit_all(&path_records(&path, &u.source.space));
            if let Some(p) = out_path {
                write_file(&p, &serialize_path(&path, &u.source.space)?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Pi0Separate {
            ctx,
            a1,
            a2,
            cell,
            out_path,
        } => {
            let mf = load_morphism(&ctx.morphism)?;
            let u = mf.morphism;
            let engine_ctx = GMContext::new(&u, ctx.r, ctx.variant.engine())?;
            let first = load_element(&a1, &u.source.space)?;
            let second = load_element(&a2, &u.source.space)?;
            let gamma = load_cell(&cell, &u.target.space)?;
            let path = pi0_separate(&engine_ctx, &first, &second, &gamma)?;
            out.emit_all(&path_records(&path, &u.source.space));
            if let Some(p) = out_path {
                write_file(&p, &serialize_path(&path, &u.source.space)?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::PinDims {
            ctx,
            tau,
            n,
            twisted,
        } => {
            let mf = load_morphism(&ctx.morphism)?;
            let u = mf.morphism;
            let engine_ctx = GMContext::new(&u, ctx.r, ctx.variant.engine())?;
            let base = load_element(&tau, &u.source.space)?;
            let cmp = homotopy_group_dimension(&engine_ctx, &base, n)?;
            out.emit(&homotopy_record(&cmp));
            let mut ok = cmp.equal;
            if twisted {
                let check = check_twisted_quasi_iso(&engine_ctx, &base)?;
                out.emit_all(&twisted_check_records(&check));
                ok = ok && check.pass;
            }
            Ok(pass_fail(ok))
        }
        Command::Fuzz { seed, count, start } => {
            let mut failures = 0usize;
            for index in start..start + count {
                let o = run_fuzz_case(seed, index);
                if !o.ok {
                    failures += 1;
                }
                out.emit(&Record::FuzzCase {
                    index: o.index,
                    seed: o.seed,
                    name: o.name,
                    dim: o.dim,
                    n: o.n,
                    abelian: o.abelian,
                    kind: match o.kind {
                        slinfty::generator::InstanceKind::Positive => "positive".into(),
                        slinfty::generator::InstanceKind::Negative => "negative".into(),
                    },
                    ok: o.ok,
                    detail: o.detail,
                });
            }
            out.emit(&Record::FuzzSummary {
                cases: count,
                failures,
                ok: failures == 0,
            });
            if failures == 0 {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(4))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Hypothesis { partial_trace, .. } = &e {
                for line in partial_trace {
                    eprintln!("  {line}");
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
