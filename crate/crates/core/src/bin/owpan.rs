//! `owpan`: command-line front end.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use owpan::capacity::{sweep_capacity, SweepSpec, SweepTarget, SweepVariable, DEFAULT_SWEEP_POINTS};
use owpan::net::{classify_topology, load_network_config, run_simulation, ReturnTechnology};
use owpan::params::{load_params, LinkBudgetParams, PARAMS_ENV};
use owpan::phy::catalog::{find_mode, format_rate, rate_rows};
use owpan::phy::{data_rate, phy_mode_catalog, Clock, PhyClass, PhyCodec};

#[derive(Parser, Debug)]
#[command(name = "owpan", version, about = "VLC-based W-OWPAN link budgets, PHY codecs and simulation")]
struct Cli {
    /// Link-budget parameter file (`key = value unit`). Defaults to the
    /// file named by OWPAN_PARAMS, else built-in defaults.
    #[arg(long, global = true)]
    params: Option<PathBuf>,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Var {
    /// Received power over noise density, dB.
    #[value(name = "pr", alias = "Pr/N0")]
    Pr,
    /// Laser span, m.
    #[value(name = "L", alias = "span")]
    L,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Target {
    Outdoor,
    EndToEnd,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity versus Pr/N0 or span, one curve per attenuation coefficient.
    CapacitySweep {
        #[arg(long, value_enum)]
        var: Var,
        #[arg(long, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, allow_negative_numbers = true)]
        max: f64,
        #[arg(long, default_value_t = DEFAULT_SWEEP_POINTS)]
        points: usize,
        #[arg(long, value_enum, default_value = "outdoor")]
        target: Target,
        /// Also write a gnuplot script plotting the CSV.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
        /// `-` for standard output.
        #[arg(long, default_value = "-")]
        output: String,
    },
    /// Operating-mode rate table, grouped as published.
    RateTable {
        /// PHY class (I-VI); all when omitted.
        #[arg(long)]
        phy: Option<String>,
        /// List every mode with its computed rate instead of grouped rows.
        #[arg(long)]
        modes: bool,
        #[arg(long, default_value = "-")]
        output: String,
    },
    /// Noiseless encode, modulate, demodulate, decode of a random payload.
    CodecRoundtrip {
        #[arg(long)]
        mode: String,
        #[arg(long, default_value_t = 256)]
        bytes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// VPPM duty cycle.
        #[arg(long, default_value_t = 0.5)]
        dimming: f64,
        /// Append the first frame's chips as a hex dump.
        #[arg(long)]
        hex: bool,
        #[arg(long, default_value = "-")]
        output: String,
    },
    /// Discrete-event simulation of a TOML topology; writes metrics CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the configured duration, s.
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long, default_value = "-")]
        output: String,
    },
    /// Five-axis classification of a TOML topology.
    Classify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "-")]
        output: String,
    },
}

fn write_output(output: &str, content: &str) -> Result<()> {
    if output == "-" {
        print!("{content}");
        Ok(())
    } else {
        std::fs::write(output, content).with_context(|| format!("writing {output}"))
    }
}

fn params(cli: &Cli) -> Result<LinkBudgetParams> {
    let p = load_params(cli.params.as_deref()).with_context(|| {
        match (&cli.params, std::env::var_os(PARAMS_ENV)) {
            (Some(p), _) => format!("loading {}", p.display()),
            (None, Some(p)) => format!("loading {} (from {PARAMS_ENV})", Path::new(&p).display()),
            (None, None) => "loading default parameters".to_string(),
        }
    })?;
    p.outdoor.warn_if_inconsistent();
    Ok(p)
}

fn capacity_sweep(cli: &Cli) -> Result<()> {
    let Command::CapacitySweep {
        var,
        min,
        max,
        points,
        target,
        gnuplot,
        output,
    } = &cli.command
    else {
        unreachable!()
    };
    let p = params(cli)?;
    let spec = SweepSpec {
        variable: match var {
            Var::Pr => SweepVariable::PrOverN0Db,
            Var::L => SweepVariable::SpanM,
        },
        min: *min,
        max: *max,
        points: *points,
        target: match target {
            Target::Outdoor => SweepTarget::Outdoor,
            Target::EndToEnd => SweepTarget::EndToEnd,
        },
    };
    let sweep = sweep_capacity(&p, &spec)?;
    let inversions = sweep.slope_inversions();
    if !inversions.is_empty() && spec.variable == SweepVariable::SpanM {
        log::info!(
            "{} grid intervals where a higher-attenuation curve falls more slowly",
            inversions.len()
        );
    }
    write_output(output, &sweep.to_csv())?;
    if let Some(script) = gnuplot {
        let csv = if output == "-" { "capacity.csv" } else { output.as_str() };
        std::fs::write(script, sweep.gnuplot_script(csv))
            .with_context(|| format!("writing {}", script.display()))?;
    }
    Ok(())
}

fn hz_label(clock: &Clock) -> String {
    match clock {
        Clock::Hz(hz) if *hz >= 1e6 => format!("{} MHz", hz / 1e6),
        Clock::Hz(hz) => format!("{} kHz", hz / 1e3),
        Clock::Label(s) => s.clone(),
    }
}

fn rate_table(cli: &Cli) -> Result<()> {
    let Command::RateTable { phy, modes, output } = &cli.command else {
        unreachable!()
    };
    let class: Option<PhyClass> = phy
        .as_deref()
        .map(str::parse)
        .transpose()
        .map_err(anyhow::Error::msg)?;
    let selected: Vec<_> = phy_mode_catalog()
        .iter()
        .filter(|m| class.is_none_or(|c| m.phy == c))
        .cloned()
        .collect();
    let mut out = String::new();
    if *modes {
        out.push_str("id\tphy\tmodulation\tline_code\tclock\touter_fec\tinner_fec\tnominal\tcomputed\n");
        for m in &selected {
            let computed = match data_rate(m) {
                Ok(r) => format_rate(r),
                Err(_) => "-".to_string(),
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                m.id,
                m.phy,
                m.modulation,
                m.line_code.label(),
                hz_label(&m.clock),
                m.outer_fec,
                m.inner_fec,
                format_rate(m.nominal_rate),
                computed
            );
        }
    } else {
        out.push_str("phy\tmodulation\tline_code\tclock\tdata_rate\n");
        for r in rate_rows(&selected) {
            let clocks: Vec<String> = r.clocks.iter().map(hz_label).collect();
            let rate = if r.min_rate == r.max_rate {
                format_rate(r.min_rate)
            } else {
                format!("{} to {}", format_rate(r.min_rate), format_rate(r.max_rate))
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.phy,
                r.modulation,
                r.line_code.label(),
                clocks.join(", "),
                rate
            );
        }
    }
    write_output(output, &out)
}

fn codec_roundtrip(cli: &Cli) -> Result<bool> {
    let Command::CodecRoundtrip {
        mode,
        bytes,
        seed,
        trials,
        dimming,
        hex,
        output,
    } = &cli.command
    else {
        unreachable!()
    };
    let m = find_mode(mode)?;
    let codec = PhyCodec::new(m)?;
    let rate = data_rate(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
    let mut failures = 0usize;
    let mut first = None;
    for _ in 0..*trials {
        let payload: Vec<u8> = (0..*bytes).map(|_| rng.random()).collect();
        let frame = codec.encode(&payload)?;
        let samples = codec.modulate(&frame, *dimming)?;
        if samples.iter().any(|&s| s < 0.0) {
            bail!("negative waveform sample in mode {mode}");
        }
        let decoded = codec
            .demodulate(&samples, payload.len())
            .and_then(|f| codec.decode(&f));
        if decoded.as_deref() != Ok(payload.as_slice()) {
            failures += 1;
        }
        if first.is_none() {
            first = Some((frame, samples.len()));
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "mode      {} (PHY {}, {})", m.id, m.phy, format_rate(rate));
    let _ = writeln!(out, "payload   {bytes} bytes x {trials} trials, seed {seed}");
    if let Some((frame, samples)) = &first {
        let _ = writeln!(out, "frame     {} chips, {} samples", frame.chips.len(), samples);
    }
    let pass = failures == 0;
    let _ = writeln!(
        out,
        "result    {} ({} of {} round trips exact)",
        if pass { "PASS" } else { "FAIL" },
        trials - failures,
        trials
    );
    if *hex {
        if let Some((frame, _)) = &first {
            out.push_str(&frame.to_hex());
        }
    }
    write_output(output, &out)?;
    Ok(pass)
}

fn simulate(cli: &Cli) -> Result<()> {
    let Command::Simulate {
        config,
        seed,
        duration,
        output,
    } = &cli.command
    else {
        unreachable!()
    };
    let p = params(cli)?;
    let cfg = load_network_config(config, &p)?;
    let mut sim = cfg
        .sim
        .with_context(|| format!("{} has no [simulation] table", config.display()))?;
    if let Some(s) = seed {
        sim.seed = *s;
    }
    if let Some(d) = duration {
        sim.duration = *d;
    }
    let metrics = run_simulation(&cfg.topology, &cfg.flows, &sim)?;
    write_output(output, &metrics.to_csv())?;
    if output == "-" {
        eprint!("{}", metrics.summary());
    } else {
        print!("{}", metrics.summary());
    }
    Ok(())
}

fn classify(cli: &Cli) -> Result<()> {
    let Command::Classify { config, output } = &cli.command else {
        unreachable!()
    };
    let p = params(cli)?;
    let cfg = load_network_config(config, &p)?;
    let c = classify_topology(&cfg.topology)?;
    let mut out = String::new();
    let _ = writeln!(out, "relayed        {}", c.relayed);
    let _ = writeln!(out, "duplex         {}", c.duplex);
    let ret = match c.return_technology {
        ReturnTechnology::Standalone => "standalone",
        ReturnTechnology::Aggregate => "aggregate",
        ReturnTechnology::NotApplicable => "n/a",
    };
    let _ = writeln!(out, "return_path    {ret}");
    let _ = writeln!(out, "parallel       {}", c.parallel);
    let _ = writeln!(out, "homogeneous    {}", c.homogeneous);
    let _ = writeln!(out, "multi_channel  {}", c.multi_channel);
    let _ = writeln!(out, "label          {c}");
    write_output(output, &out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::CapacitySweep { .. } => capacity_sweep(&cli).map(|_| true),
        Command::RateTable { .. } => rate_table(&cli).map(|_| true),
        Command::CodecRoundtrip { .. } => codec_roundtrip(&cli),
        Command::Simulate { .. } => simulate(&cli).map(|_| true),
        Command::Classify { .. } => classify(&cli).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
