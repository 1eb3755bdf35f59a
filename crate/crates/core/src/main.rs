use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use jnb::candidate::{bellman, Foliation};
use jnb::optimizer::{a_infty_characteristic, build_optimizer, moments_with};
use jnb::special::omega_with;
use jnb::transition::{solve_transition, thresholds};
use jnb::verify::{limit_scan, run_suite_with};
use jnb::{Error, Parameters, Point, QuadratureConfig, Result};

/// John-Nirenberg constants of BMO^p (p > 2) and the extremal machinery
/// behind them.
#[derive(Parser)]
#[command(name = "jnb", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print eps0(p), the John-Nirenberg constant of BMO^p.
    Eps0 {
        #[arg(long)]
        p: f64,
    },
    /// Evaluate the extremal function at one point of Omega_C.
    Eval {
        #[arg(long)]
        p: f64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long)]
        x1: f64,
        #[arg(long)]
        x2: f64,
    },
    /// Print the derived constants of the construction at (p, C).
    Constants {
        #[arg(long)]
        p: f64,
        #[arg(long = "C")]
        c: f64,
    },
    /// Tabulate the extremal function on a grid. Rows are parameterized by
    /// x1 and the ratio R = x2 / e^{x1} in [1, C], so every node lies in
    /// Omega_C.
    Grid {
        #[arg(long)]
        p: f64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long)]
        x1_min: f64,
        #[arg(long)]
        x1_max: f64,
        #[arg(long)]
        n1: usize,
        #[arg(long, default_value_t = 1.0)]
        r_min: f64,
        #[arg(long)]
        r_max: f64,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Sample the optimizing test function at one point and report its
    /// moments and characteristic.
    Optimizer {
        #[arg(long)]
        p: f64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long)]
        x1: f64,
        #[arg(long)]
        x2: f64,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the verification suite; exit 0 only if every entry passes.
    Verify {
        #[arg(long)]
        p: f64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Track the value at (0, C) toward eps0(p)^p along a list of C values
    /// (defaults to {2, 10, 100, 1000} C0(p)).
    LimitScan {
        #[arg(long)]
        p: f64,
        #[arg(long = "C")]
        c: Vec<f64>,
    },
}

fn quad_from_env() -> Result<QuadratureConfig> {
    let mut cfg = QuadratureConfig::default();
    if let Ok(raw) = std::env::var("JNB_QUAD_TOL") {
        let tol: f64 = raw
            .parse()
            .map_err(|_| Error::Domain(format!("JNB_QUAD_TOL is not a number: {raw}")))?;
        cfg = QuadratureConfig::new(tol, cfg.rel_tol, cfg.max_depth)?;
    }
    Ok(cfg)
}

/// 17 significant digits: enough for a bit-exact f64 round trip.
fn g17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".into(),
    });
    fs::write(&tmp, contents).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

#[derive(Serialize)]
struct FoliationOut {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alphas: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
}

impl From<Foliation> for FoliationOut {
    fn from(f: Foliation) -> Self {
        let mut out = FoliationOut {
            kind: "",
            u: None,
            alphas: None,
            v: None,
            w: None,
            beta: None,
        };
        match f {
            Foliation::Tangent { u } => {
                out.kind = "tangent";
                out.u = Some(u);
            }
            Foliation::Affine { alphas } => {
                out.kind = "affine";
                out.alphas = Some(alphas);
            }
            Foliation::Chord(cc) => {
                out.kind = "chord";
                out.v = Some(cc.pair.v);
                out.w = Some(cc.pair.w);
                out.beta = Some(cc.beta);
            }
        }
        out
    }
}

fn setup(p: f64, c: f64) -> Result<(Parameters, jnb::TransitionConstants)> {
    let params = Parameters::with_config(p, c, quad_from_env()?)?;
    let tc = solve_transition(&params)?;
    Ok((params, tc))
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Eps0 { p } => {
            let eps0 = omega_with(p, &quad_from_env()?)?;
            println!("{}", serde_json::json!({ "p": p, "eps0": eps0 }));
            Ok(0)
        }
        Cmd::Eval { p, c, x1, x2 } => {
            let (params, tc) = setup(p, c)?;
            let b = bellman(&params, &tc, Point::new(x1, x2))?;
            let b_x2 = jnb::candidate::bellman_x2(&params, &tc, Point::new(x1, x2))?;
            let record = serde_json::json!({
                "p": p, "C": c, "x1": x1, "x2": x2,
                "label": b.label.to_string(),
                "b": b.value,
                "b_x2": b_x2,
                "foliation": FoliationOut::from(b.foliation),
            });
            println!("{record}");
            Ok(0)
        }
        Cmd::Constants { p, c } => {
            let (params, tc) = setup(p, c)?;
            let (xi0, c0) = thresholds(p)?;
            let record = serde_json::json!({
                "p": p, "C": c,
                "xi": params.xi(),
                "xi0": xi0,
                "c0": c0,
                "c1": tc.c1,
                "c2": tc.c2,
                "w_star": tc.w_star,
                "w_bar": tc.w_bar,
                "v_bar": tc.v_bar,
                "d_bar": tc.d_bar,
            });
            println!("{record}");
            Ok(0)
        }
        Cmd::Grid {
            p,
            c,
            x1_min,
            x1_max,
            n1,
            r_min,
            r_max,
            n2,
            out,
            format,
        } => {
            if n1 < 2 || n2 < 2 {
                return Err(Error::Domain("grid needs n1 >= 2 and n2 >= 2".into()));
            }
            if !(1.0 <= r_min && r_min <= r_max && r_max <= c) {
                return Err(Error::Domain(format!(
                    "grid requires 1 <= r_min <= r_max <= C, got [{r_min}, {r_max}]"
                )));
            }
            let (params, tc) = setup(p, c)?;
            let mut body = String::new();
            if format == Format::Csv {
                body.push_str("x1,x2,label,b\n");
            }
            for i in 0..n1 {
                let x1 = x1_min + (x1_max - x1_min) * i as f64 / (n1 - 1) as f64;
                for j in 0..n2 {
                    let r = r_min + (r_max - r_min) * j as f64 / (n2 - 1) as f64;
                    let x2 = r * x1.exp();
                    let b = bellman(&params, &tc, Point::new(x1, x2))?;
                    match format {
                        Format::Csv => {
                            body.push_str(&format!(
                                "{},{},{},{}\n",
                                g17(x1),
                                g17(x2),
                                b.label,
                                g17(b.value)
                            ));
                        }
                        Format::Json => {
                            body.push_str(&format!(
                                "{}\n",
                                serde_json::json!({
                                    "x1": x1, "x2": x2,
                                    "label": b.label.to_string(),
                                    "b": b.value,
                                })
                            ));
                        }
                    }
                }
            }
            write_atomic(&out, &body)?;
            Ok(0)
        }
        Cmd::Optimizer {
            p,
            c,
            x1,
            x2,
            samples,
            out,
            format,
        } => {
            if samples < 2 {
                return Err(Error::Domain("need at least 2 samples".into()));
            }
            let (params, tc) = setup(p, c)?;
            let x = Point::new(x1, x2);
            let phi = build_optimizer(&params, &tc, x)?;
            let m = moments_with(&phi, p, params.quad());
            let chi = a_infty_characteristic(&phi);
            let mut body = String::new();
            if format == Format::Csv {
                body.push_str("t,phi\n");
            }
            for i in 0..samples {
                let t = (i as f64 + 0.5) / samples as f64;
                match format {
                    Format::Csv => {
                        body.push_str(&format!("{},{}\n", g17(t), g17(phi.eval(t))));
                    }
                    Format::Json => {
                        body.push_str(&format!(
                            "{}\n",
                            serde_json::json!({ "t": t, "phi": phi.eval(t) })
                        ));
                    }
                }
            }
            let footer = serde_json::json!({
                "mean": m.mean,
                "exp_mean": m.exp_mean,
                "p_mean": m.p_mean,
                "a_infty": chi,
            });
            body.push_str(&format!("# {footer}\n"));
            write_atomic(&out, &body)?;
            Ok(0)
        }
        Cmd::Verify { p, c, seed, out } => {
            let (params, tc) = setup(p, c)?;
            let report = run_suite_with(&params, &tc, seed);
            let json = report.to_json();
            match out {
                Some(path) => write_atomic(&path, &json)?,
                None => println!("{json}"),
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Cmd::LimitScan { p, c } => {
            let cs = if c.is_empty() {
                let (_, c0) = thresholds(p)?;
                vec![2.0 * c0, 10.0 * c0, 100.0 * c0, 1000.0 * c0]
            } else {
                c
            };
            for row in limit_scan(p, &cs)? {
                println!(
                    "{}",
                    serde_json::json!({ "c": row.c, "b0c": row.b0c, "omega_gap": row.omega_gap })
                );
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Io(_) => 3,
                Error::Domain(_) | Error::Bracket(_) => 2,
            };
            ExitCode::from(code)
        }
    }
}
