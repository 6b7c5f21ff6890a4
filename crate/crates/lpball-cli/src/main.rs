//! `lpball` command line: constants, samplers, rate-function grids, the
//! Legendre-Fenchel transform, and Monte Carlo verification runs.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numeric failure
//! (nonconvergence), 3 verification verdict failure.

mod emit;
mod grid;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_pcg::Pcg64Mcg;

use lpball::distributions::{sample_ball, MixingLaw};
use lpball::error::Error;
use lpball::harness::{run_experiment, ExperimentConfig};
use lpball::ratefun::{
    ldp_rate_q_above_p, ldp_rate_q_below_p, ldp_rate_q_equals_p, legendre_fenchel, mdp_rate,
    ExtReal, MixingRate, SpeedKind,
};
use lpball::specfun::{
    abs_moment, clt_variance, covariance_matrix, gen_clt_variance, proj_variance_det,
    proj_variance_random, BallParams,
};
use lpball::textio::fmt_float;

use emit::OutputTarget;
use grid::parse_grid;

#[derive(Parser)]
#[command(
    name = "lpball",
    version,
    about = "Sampling and limit-theorem toolkit for l_p^n balls"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form constants for a (p, q) pair.
    Constants(ConstantsArgs),
    /// Draw ball points and emit norms or coordinates as CSV.
    Sample(SampleArgs),
    /// Tabulate a rate function on a grid.
    Rate(RateArgs),
    /// Evaluate the Legendre-Fenchel transform of the log-MGF.
    Conjugate(ConjugateArgs),
    /// Run a Monte Carlo verification experiment from a JSON config.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    /// Also emit the projection variances at this subspace fraction.
    #[arg(long)]
    lambda: Option<f64>,
    /// Mixing normalization mu for the generalized CLT variance.
    #[arg(long, requires = "tau2")]
    mu: Option<f64>,
    /// Mixing normalization tau^2 for the generalized CLT variance.
    #[arg(long, requires = "mu")]
    tau2: Option<f64>,
    /// Output file (stdout when absent); written atomically.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    n: usize,
    /// Mixing law: dirac0 | exponential:RATE | gamma:SHAPE:RATE.
    #[arg(long)]
    law: String,
    #[arg(long)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// What to emit: "norms" (q-norm per draw) or "coords".
    #[arg(long, default_value = "norms")]
    emit: String,
    /// Norm exponent for --emit norms; defaults to p.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RateArgs {
    /// Which rate function: mdp | ldp_qgtp | ldp_qltp | ldp_peq.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    p: f64,
    #[arg(long, required_if_eq_any([("kind", "mdp"), ("kind", "ldp_qgtp"), ("kind", "ldp_qltp")]))]
    q: Option<f64>,
    /// Evaluation grid start:stop:count (endpoints inclusive).
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Mixing rate for the contraction branches: dirac | exponential.
    #[arg(long, default_value = "dirac")]
    mixing: String,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConjugateArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    /// First conjugate argument, or a grid start:stop:count.
    #[arg(long, allow_hyphen_values = true)]
    s1: String,
    /// Second conjugate argument (fixed scalar).
    #[arg(long, allow_hyphen_values = true)]
    s2: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Report directory; defaults to $LPBALL_OUT_DIR, then ".".
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the Monte Carlo chunks.
    #[arg(long)]
    threads: Option<usize>,
}

/// What a run produced, beyond its outputs.
enum Outcome {
    Ok,
    VerdictFailure,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, everything else is a
            // configuration error (exit 1, not clap's default 2)
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error[config]: {}", first_line(&e.to_string()));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerdictFailure) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error[{}]: {}", e.tag(), first_line(&e.to_string()));
            if e.is_config() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or("").to_string()
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Constants(args) => constants(args),
        Command::Sample(args) => sample(args),
        Command::Rate(args) => rate(args),
        Command::Conjugate(args) => conjugate(args),
        Command::Verify(args) => verify(args),
    }
}

fn constants(args: ConstantsArgs) -> Result<Outcome, Error> {
    let (p, q) = (args.p, args.q);
    let cov = covariance_matrix(p, q)?;
    let mut header = String::from("p,q,m_p,clt_variance,cov_c11,cov_c12,cov_c22");
    let mut row = format!(
        "{},{},{},{},{},{},{}",
        fmt_float(p),
        fmt_float(q),
        fmt_float(abs_moment(p, q)?),
        fmt_float(clt_variance(p, q)?),
        fmt_float(cov.c11),
        fmt_float(cov.c12),
        fmt_float(cov.c22),
    );
    if let Some(lambda) = args.lambda {
        header.push_str(",proj_variance_random,proj_variance_det");
        row.push_str(&format!(
            ",{},{}",
            fmt_float(proj_variance_random(p, lambda)?),
            fmt_float(proj_variance_det(p, lambda)?)
        ));
    }
    if let (Some(mu), Some(tau2)) = (args.mu, args.tau2) {
        header.push_str(",gen_clt_variance");
        row.push_str(&format!(
            ",{}",
            fmt_float(gen_clt_variance(p, q, mu, tau2)?)
        ));
    }
    OutputTarget::new(args.out).write(&format!("{header}\n{row}\n"))?;
    Ok(Outcome::Ok)
}

fn parse_law(text: &str) -> Result<MixingLaw, Error> {
    let parts: Vec<&str> = text.split(':').collect();
    let parse = |s: &str| -> Result<f64, Error> {
        s.parse::<f64>()
            .map_err(|_| Error::Config(format!("cannot parse '{s}' as a number in law '{text}'")))
    };
    match parts.as_slice() {
        ["dirac0"] => Ok(MixingLaw::Dirac0),
        ["exponential", rate] => MixingLaw::exponential(parse(rate)?),
        ["gamma", shape, rate] => MixingLaw::gamma(parse(shape)?, parse(rate)?),
        _ => Err(Error::Config(format!(
            "unknown mixing law '{text}' (expected dirac0, exponential:RATE or gamma:SHAPE:RATE)"
        ))),
    }
}

fn sample(args: SampleArgs) -> Result<Outcome, Error> {
    let law = parse_law(&args.law)?;
    let q = args.q.unwrap_or(args.p);
    let params = BallParams::new(args.p, q, args.n)?;
    if args.draws == 0 {
        return Err(Error::Config("draws must be positive".into()));
    }
    let mut rng = Pcg64Mcg::seed_from_u64(args.seed);
    let mut out = String::new();
    match args.emit.as_str() {
        "norms" => {
            out.push_str("draw_index,value\n");
            for i in 0..args.draws {
                let z = sample_ball(&params, &law, &mut rng)?;
                out.push_str(&format!("{i},{}\n", fmt_float(z.norm(q))));
            }
        }
        "coords" => {
            out.push_str("draw_index");
            for j in 1..=args.n {
                out.push_str(&format!(",x{j}"));
            }
            out.push('\n');
            for i in 0..args.draws {
                let z = sample_ball(&params, &law, &mut rng)?;
                out.push_str(&i.to_string());
                for c in &z.coords {
                    out.push(',');
                    out.push_str(&fmt_float(*c));
                }
                out.push('\n');
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown emit mode '{other}' (norms or coords)"
            )))
        }
    }
    OutputTarget::new(args.out).write(&out)?;
    Ok(Outcome::Ok)
}

fn parse_mixing_rate(text: &str, p: f64) -> Result<MixingRate, Error> {
    match text {
        "dirac" => Ok(MixingRate::Dirac),
        "exponential" => Ok(MixingRate::Exponential { p }),
        _ => Err(Error::Config(format!(
            "unknown mixing rate '{text}' (expected dirac or exponential)"
        ))),
    }
}

fn rate(args: RateArgs) -> Result<Outcome, Error> {
    let xs = parse_grid(&args.grid)?;
    let p = args.p;
    let need_q = || {
        args.q
            .ok_or_else(|| Error::Config("this rate kind needs --q".into()))
    };
    let (speed, values): (SpeedKind, Vec<ExtReal>) = match args.kind.as_str() {
        "mdp" => {
            let q = need_q()?;
            let vals = xs
                .iter()
                .map(|&t| mdp_rate(t, p, q).map(ExtReal::new))
                .collect::<Result<_, _>>()?;
            (SpeedKind::BnSquared, vals)
        }
        "ldp_qgtp" => {
            let q = need_q()?;
            let vals = xs
                .iter()
                .map(|&x| ldp_rate_q_above_p(x, p, q))
                .collect::<Result<_, _>>()?;
            (SpeedKind::NPowPOverQ, vals)
        }
        "ldp_qltp" => {
            let q = need_q()?;
            let iw = parse_mixing_rate(&args.mixing, p)?;
            let eval = || -> Result<Vec<ExtReal>, Error> {
                xs.par_iter()
                    .map(|&x| ldp_rate_q_below_p(x, p, q, &iw))
                    .collect::<Result<_, _>>()
            };
            use rayon::prelude::*;
            let vals = match args.threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?
                    .install(eval),
                None => eval(),
            }?;
            (SpeedKind::N, vals)
        }
        "ldp_peq" => {
            let iw = parse_mixing_rate(&args.mixing, p)?;
            let vals = xs
                .iter()
                .map(|&x| ldp_rate_q_equals_p(x, p, &iw))
                .collect::<Result<_, _>>()?;
            (SpeedKind::N, vals)
        }
        other => {
            return Err(Error::Config(format!(
                "unknown rate kind '{other}' (mdp, ldp_qgtp, ldp_qltp or ldp_peq)"
            )))
        }
    };
    let mut out = String::from("x,rate,speed_kind\n");
    for (x, v) in xs.iter().zip(&values) {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_float(*x),
            fmt_float(v.as_f64()),
            speed.label()
        ));
    }
    OutputTarget::new(args.out).write(&out)?;
    Ok(Outcome::Ok)
}

fn conjugate(args: ConjugateArgs) -> Result<Outcome, Error> {
    let s1_values = if args.s1.contains(':') {
        parse_grid(&args.s1)?
    } else {
        vec![args
            .s1
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("cannot parse --s1 '{}'", args.s1)))?]
    };
    let mut out = String::from("s1,s2,value,t1,t2,converged\n");
    for &s1 in &s1_values {
        let cp = legendre_fenchel(s1, args.s2, args.p, args.q)?;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_float(s1),
            fmt_float(args.s2),
            fmt_float(cp.value.as_f64()),
            fmt_float(cp.argmax.0),
            fmt_float(cp.argmax.1),
            cp.converged
        ));
    }
    OutputTarget::new(args.out).write(&out)?;
    Ok(Outcome::Ok)
}

fn verify(args: VerifyArgs) -> Result<Outcome, Error> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", args.config.display())))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out_dir = args
        .output_dir
        .or_else(|| std::env::var_os("LPBALL_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let stem = args
        .config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".into());

    let report = run_experiment(&config, args.threads)?;

    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", out_dir.display())))?;
    let csv = report.to_csv();
    emit::write_atomic(&out_dir.join(format!("{stem}_report.csv")), &csv)?;
    emit::write_atomic(
        &out_dir.join(format!("{stem}_summary.json")),
        &report.to_json(),
    )?;

    print!("{csv}");
    if report.passed() {
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::VerdictFailure)
    }
}
