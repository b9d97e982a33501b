use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use rescong::arith::{factorize, jordan_totient};
use rescong::congruence::{count_general_with, ArgConvention, CongruenceInstance};
use rescong::fourier::generalized_ramanujan_sum;
use rescong::fuzz::{disagreement_classes, fuzz_campaign, general_name, FuzzDomain, Sampling};
use rescong::json::{
    fuzz_report_to_json, fuzz_summary_to_json, instance_to_json, parse_instance_file,
    report_to_json,
};
use rescong::oracle::{oracle_count_with, oracle_enumerate_with, OracleBounds};
use rescong::{Error, Result};

/// Exact solution counts for restricted linear congruences
/// a₁ˢx₁+…+aₖˢxₖ ≡ b (mod nˢ) with (xᵢ, nˢ)ₛ = tᵢˢ.
#[derive(Parser)]
#[command(name = "rescong", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count solutions with the closed form.
    Count {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
        /// Also run the brute-force oracle and fail on mismatch.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = ArgConvention::default())]
        convention: ArgConvention,
    },
    /// List the solution tuples (small moduli only).
    Enumerate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Print a table of arithmetic function values as CSV.
    Table {
        #[command(subcommand)]
        table: Table,
    },
    /// Print one generalized Ramanujan sum c_{r,s}(m).
    Grs {
        #[arg(long)]
        r: u128,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long, allow_hyphen_values = true)]
        m: BigInt,
    },
    /// Compare every closed form with the oracle over a domain.
    Fuzz(FuzzArgs),
}

#[derive(Subcommand)]
enum Table {
    /// Jordan totient Jₛ(n) for n = 1..=max.
    Jordan {
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long)]
        max: u128,
    },
    /// c_{r,s}(m) for r = 1..=max and m in [m-min, m-max].
    Grs {
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long)]
        max: u128,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m_min: i64,
        /// Defaults to rˢ - 1 for each r.
        #[arg(long, allow_hyphen_values = true)]
        m_max: Option<i64>,
    },
    /// Ramanujan sums c_r(m) for r = 1..=max and m in [m-min, m-max].
    Ramanujan {
        #[arg(long)]
        max: u128,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m_min: i64,
        #[arg(long, allow_hyphen_values = true)]
        m_max: Option<i64>,
    },
}

#[derive(Args)]
struct InstanceArgs {
    /// Coefficients, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required_unless_present = "file"
    )]
    a: Vec<BigInt>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "file")]
    b: Option<BigInt>,
    #[arg(long, required_unless_present = "file")]
    n: Option<u128>,
    #[arg(long, required_unless_present = "file")]
    s: Option<u32>,
    /// Restrictions, comma separated.
    #[arg(long, value_delimiter = ',', required_unless_present = "file")]
    t: Vec<u128>,
    /// JSON file holding one instance or an array of instances.
    #[arg(long, conflicts_with_all = ["a", "b", "n", "s", "t"])]
    file: Option<PathBuf>,
}

impl InstanceArgs {
    fn instances(&self) -> Result<Vec<CongruenceInstance>> {
        match &self.file {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::InvalidField {
                    field: "file".into(),
                    message: format!("{}: {e}", path.display()),
                })?;
                parse_instance_file(&text)
            }
            None => Ok(vec![CongruenceInstance::new(
                self.a.clone(),
                self.b.clone().expect("required by clap"),
                self.n.expect("required by clap"),
                self.s.expect("required by clap"),
                self.t.clone(),
            )?]),
        }
    }
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 1)]
    n_min: u128,
    #[arg(long)]
    n_max: u128,
    #[arg(long, default_value_t = 1)]
    s_min: u32,
    #[arg(long, default_value_t = 1)]
    s_max: u32,
    #[arg(long, default_value_t = 1)]
    k_min: usize,
    #[arg(long, default_value_t = 1)]
    k_max: usize,
    /// Every instance in the domain.
    #[arg(long, conflicts_with = "draws")]
    exhaustive: bool,
    /// Number of random instances.
    #[arg(long, required_unless_present = "exhaustive")]
    draws: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use aᵢ = 1 for every variable.
    #[arg(long)]
    units: bool,
    /// Write one JSON report per instance to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn io_err(e: io::Error) -> Error {
    Error::Capacity(format!("output failed: {e}"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Capacity(format!("output failed: {e}"))
}

fn cmd_count(
    instance: &InstanceArgs,
    format: Format,
    check: bool,
    convention: ArgConvention,
) -> Result<()> {
    let instances = instance.instances()?;
    let bounds = OracleBounds::from_env()?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut mismatch = None;
    for inst in &instances {
        let report = count_general_with(inst, convention)?;
        let oracle = if check {
            let o = oracle_count_with(inst, &bounds)?;
            if BigInt::from(o) != BigInt::from(report.count.clone()) {
                mismatch.get_or_insert(format!(
                    "closed form gives {} but the oracle counts {o} for {}",
                    report.count,
                    instance_to_json(inst)
                ));
            }
            Some(o)
        } else {
            None
        };
        match format {
            Format::Json => {
                writeln!(out, "{}", report_to_json(inst, &report, convention, oracle))
            }
            Format::Csv => {
                rows.push(vec![
                    join(inst.coefficients(), ","),
                    inst.b().to_string(),
                    inst.n().to_string(),
                    inst.s().to_string(),
                    join(&inst.restrictions(), ","),
                    report.count.to_string(),
                    report.solvable.to_string(),
                    report.reason.to_string(),
                    join(&report.derived_d, ","),
                    convention.to_string(),
                    report.verified.to_string(),
                    oracle.map(|o| o.to_string()).unwrap_or_default(),
                ]);
                Ok(())
            }
            Format::Human => {
                let mut text = format!(
                    "count {}\nsolvable {}\nreason {}\nderived_d {}\nconvention {}\nverified {}\n",
                    report.count,
                    report.solvable,
                    report.reason,
                    join(&report.derived_d, ","),
                    convention,
                    report.verified
                );
                if let Some(o) = oracle {
                    text.push_str(&format!("oracle_count {o}\n"));
                }
                if instances.len() > 1 {
                    text.push('\n');
                }
                write!(out, "{text}")
            }
        }
        .map_err(io_err)?;
    }
    if format == Format::Csv {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record([
            "a",
            "b",
            "n",
            "s",
            "t",
            "count",
            "solvable",
            "reason",
            "derived_d",
            "convention",
            "verified",
            "oracle_count",
        ])
        .map_err(csv_err)?;
        for row in &rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    match mismatch {
        Some(m) => Err(Error::Inconsistent(m)),
        None => Ok(()),
    }
}

fn cmd_enumerate(instance: &InstanceArgs, format: Format) -> Result<()> {
    let bounds = OracleBounds::from_env()?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for inst in instance.instances()? {
        let tuples = oracle_enumerate_with(&inst, &bounds)?;
        match format {
            Format::Json => {
                let v = serde_json::json!({
                    "instance": instance_to_json(&inst),
                    "solutions": tuples,
                });
                writeln!(out, "{v}").map_err(io_err)?;
            }
            Format::Csv => {
                let header: Vec<String> = (1..=inst.k()).map(|i| format!("x{i}")).collect();
                writeln!(out, "{}", header.join(",")).map_err(io_err)?;
                for t in &tuples {
                    writeln!(out, "{}", join(t, ",")).map_err(io_err)?;
                }
            }
            Format::Human => {
                for t in &tuples {
                    writeln!(out, "({})", join(t, ", ")).map_err(io_err)?;
                }
            }
        }
    }
    out.flush().map_err(io_err)
}

fn grs_rows(out: &mut impl Write, s: u32, max: u128, m_min: i64, m_max: Option<i64>) -> Result<()> {
    writeln!(out, "r,m,value").map_err(io_err)?;
    for r in 1..=max {
        let hi = match m_max {
            Some(m) => m,
            None => {
                let period = r
                    .checked_pow(s)
                    .and_then(|p| i64::try_from(p).ok())
                    .ok_or_else(|| Error::Capacity(format!("{r}^{s} is too large to tabulate")))?;
                period - 1
            }
        };
        for m in m_min..=hi {
            let v = generalized_ramanujan_sum(r, s, m)?;
            writeln!(out, "{r},{m},{v}").map_err(io_err)?;
        }
    }
    Ok(())
}

fn cmd_table(table: &Table) -> Result<()> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match *table {
        Table::Jordan { s, max } => {
            if s == 0 {
                return Err(Error::InvalidField {
                    field: "s".into(),
                    message: "must be at least 1".into(),
                });
            }
            writeln!(out, "n,jordan").map_err(io_err)?;
            for n in 1..=max {
                let j = jordan_totient(&factorize(n)?, s);
                writeln!(out, "{n},{j}").map_err(io_err)?;
            }
        }
        Table::Grs {
            s,
            max,
            m_min,
            m_max,
        } => grs_rows(&mut out, s, max, m_min, m_max)?,
        Table::Ramanujan { max, m_min, m_max } => grs_rows(&mut out, 1, max, m_min, m_max)?,
    }
    out.flush().map_err(io_err)
}

fn cmd_fuzz(args: &FuzzArgs) -> Result<()> {
    let domain = FuzzDomain {
        n: (args.n_min, args.n_max),
        s: (args.s_min, args.s_max),
        k: (args.k_min, args.k_max),
        unit_coefficients: args.units,
        sampling: match args.draws {
            Some(draws) if !args.exhaustive => Sampling::Random { draws },
            _ => Sampling::Exhaustive,
        },
        seed: args.seed,
    };
    let bounds = OracleBounds::from_env()?;
    let (reports, summary) = fuzz_campaign(&domain, &bounds)?;
    if let Some(path) = &args.out {
        let file = fs::File::create(path).map_err(|e| Error::InvalidField {
            field: "out".into(),
            message: format!("{}: {e}", path.display()),
        })?;
        let mut w = BufWriter::new(file);
        for r in &reports {
            writeln!(w, "{}", fuzz_report_to_json(r)).map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;
    }
    println!("{}", fuzz_summary_to_json(&summary));
    if summary.all_agree() {
        Ok(())
    } else {
        let classes = disagreement_classes(&reports, &general_name(ArgConvention::default()));
        Err(Error::Inconsistent(format!(
            "{} of {} instances disagree with the oracle ({} classes for the default convention)",
            summary.disagreements,
            summary.instances,
            classes.len()
        )))
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Count {
            instance,
            format,
            check,
            convention,
        } => cmd_count(instance, *format, *check, *convention),
        Command::Enumerate { instance, format } => cmd_enumerate(instance, *format),
        Command::Table { table } => cmd_table(table),
        Command::Grs { r, s, m } => {
            println!("{}", generalized_ramanujan_sum(*r, *s, m.clone())?);
            Ok(())
        }
        Command::Fuzz(args) => cmd_fuzz(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
