//! Command-line front end: analyze, cells, homology, surgery, witness,
//! verify, polytope, export. Outputs are deterministic byte-for-byte for
//! identical invocations; exit code 0 on success, 1 on a domain error,
//! 2 on a usage error.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use linkcw_core::complex::{BuildOptions, CellComplex};
use linkcw_core::linkage::{parse_lengths, Linkage};
use linkcw_core::partition::CyclicPartition;
use linkcw_core::polytope::{cyclic_facets, PermutohedronLattice};
use linkcw_core::realization::surgery;
use linkcw_core::verify::{run_suite, VerifyLevel};
use linkcw_core::witness::{label_of, witness_of};

/// Full complex builds above this edge count need --allow-large: the facet
/// count grows as (n-1)!.
const DESK_SCALE_N: usize = 9;

#[derive(Parser)]
#[command(
    name = "linkcw",
    version,
    about = "Cell complexes of planar polygonal linkage moduli spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a linkage: genericity, f-vector, Euler characteristic,
    /// components, mod-2 Betti numbers
    Analyze {
        /// Comma-separated edge lengths: integers, p/q, or finite decimals
        #[arg(long)]
        lengths: String,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
        /// Build even for a non-generic linkage (the manifold
        /// interpretation fails on walls)
        #[arg(long)]
        force: bool,
        #[arg(long)]
        allow_large: bool,
    },
    /// List the cell labels of one dimension, lexicographically
    Cells {
        #[arg(long)]
        lengths: String,
        /// Cell dimension, 0..=n-3
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        allow_large: bool,
    },
    /// Mod-2 Betti numbers and the Euler characteristic
    Homology {
        #[arg(long)]
        lengths: String,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        allow_large: bool,
    },
    /// Realize the dual complex by surgery on the permutohedron and write
    /// it to a .off (n=5 only) or .json file
    Surgery {
        #[arg(long)]
        lengths: String,
        /// Output path; the extension picks the format
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        allow_large: bool,
    },
    /// Emit a planar configuration realizing a cell label
    Witness {
        #[arg(long)]
        lengths: String,
        /// Cell label, e.g. "1|2|3|4,5"
        #[arg(long)]
        label: String,
        /// Also write an SVG outline of the polygon
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run the invariant suite against a built complex
    Verify {
        #[arg(long)]
        lengths: String,
        #[arg(long, value_enum, default_value_t = Level::Fast)]
        level: Level,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        allow_large: bool,
        /// Corrupt the complex first (test hook)
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Reference polytopes as JSON
    Polytope {
        #[command(subcommand)]
        which: PolytopeCommand,
    },
    /// Export the full complex as JSON
    Export {
        #[arg(long)]
        lengths: String,
        /// Output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        allow_large: bool,
    },
}

#[derive(Subcommand)]
enum PolytopeCommand {
    /// Face lattice of the permutohedron on {1..m}
    Permutohedron {
        #[arg(long)]
        m: usize,
    },
    /// Facets of the cyclic polytope C(n, d) by Gale evenness
    Cyclic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Fast,
    Full,
}

enum CliError {
    Domain(String),
    Usage(String),
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn main() -> ExitCode {
    if let Some(threads) = std::env::var_os("LINKAGE_THREADS") {
        let parsed = threads.to_str().and_then(|t| t.parse::<usize>().ok());
        match parsed {
            Some(t) if t > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global();
            }
            _ => {
                eprintln!("error: LINKAGE_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn build_complex(
    lengths: &str,
    force: bool,
    allow_large: bool,
) -> Result<(Linkage, CellComplex), CliError> {
    let linkage = parse_lengths(lengths)?;
    if linkage.n() > DESK_SCALE_N && !allow_large {
        return Err(CliError::Domain(format!(
            "n={} exceeds the desk-scale bound {DESK_SCALE_N}; pass --allow-large to proceed",
            linkage.n()
        )));
    }
    if !linkage.is_generic()? {
        if !force {
            return Err(CliError::Domain(
                "non-generic linkage: some subset of edges sums to half the perimeter; \
                 pass --force to build anyway"
                    .into(),
            ));
        }
        eprintln!(
            "warning: non-generic linkage; the complex is built with the nonsingular \
             admissibility rule and need not be a manifold"
        );
    }
    let complex = CellComplex::build_with(
        &linkage,
        BuildOptions {
            allow_non_generic: force,
        },
    )?;
    Ok((linkage, complex))
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze {
            lengths,
            json,
            force,
            allow_large,
        } => {
            let (linkage, complex) = build_complex(&lengths, force, allow_large)?;
            let generic = linkage.is_generic()?;
            let f = complex.f_vector();
            let betti = complex.betti_mod2()?;
            if json {
                let value = json!({
                    "n": linkage.n(),
                    "lengths": linkage
                        .lengths()
                        .iter()
                        .map(linkcw_core::linkage::rational_to_string)
                        .collect::<Vec<_>>(),
                    "generic": generic,
                    "f_vector": f,
                    "euler_characteristic": complex.euler_characteristic(),
                    "connected_components": complex.connected_components(),
                    "betti_mod2": betti,
                });
                println!("{value}");
            } else {
                println!("n: {}", linkage.n());
                println!("lengths: {}", linkage.to_lengths_string());
                println!("generic: {generic}");
                println!("f-vector: {}", join(&f));
                println!("euler-characteristic: {}", complex.euler_characteristic());
                println!("connected-components: {}", complex.connected_components());
                println!("betti-mod2: {}", join(&betti));
            }
            Ok(())
        }
        Command::Cells {
            lengths,
            dim,
            force,
            allow_large,
        } => {
            let (linkage, complex) = build_complex(&lengths, force, allow_large)?;
            if dim > linkage.n() - 3 {
                return Err(CliError::Usage(format!(
                    "dim {dim} out of range 0..={}",
                    linkage.n() - 3
                )));
            }
            for cell in complex.cells_of_dim(dim) {
                println!("{}", cell.label);
            }
            Ok(())
        }
        Command::Homology {
            lengths,
            json,
            force,
            allow_large,
        } => {
            let (_, complex) = build_complex(&lengths, force, allow_large)?;
            let betti = complex.betti_mod2()?;
            if json {
                let value = json!({
                    "betti_mod2": betti,
                    "euler_characteristic": complex.euler_characteristic(),
                    "connected_components": complex.connected_components(),
                });
                println!("{value}");
            } else {
                println!("betti-mod2: {}", join(&betti));
                println!("euler-characteristic: {}", complex.euler_characteristic());
                println!("connected-components: {}", complex.connected_components());
            }
            Ok(())
        }
        Command::Surgery {
            lengths,
            out,
            allow_large,
        } => {
            let (linkage, complex) = build_complex(&lengths, false, allow_large)?;
            let format = match out.extension().and_then(|e| e.to_str()) {
                Some("off") => "off",
                Some("json") => "json",
                other => {
                    return Err(CliError::Usage(format!(
                        "unsupported output extension {:?}: expected .off or .json",
                        other.unwrap_or("")
                    )))
                }
            };
            let geometry = surgery(&complex)?;
            let top = linkage.n() - 2;
            println!(
                "removed {}, patched {}, kept {}",
                geometry.removed_count(top - 1),
                geometry.patched_count(top - 1),
                geometry.kept_count(top - 1),
            );
            let payload = match format {
                "off" => geometry.to_off()?,
                _ => format!("{}\n", geometry.to_json()),
            };
            fs::write(&out, payload).map_err(|e| CliError::Domain(e.to_string()))?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Witness {
            lengths,
            label,
            svg,
        } => {
            let linkage = parse_lengths(&lengths)?;
            let label = CyclicPartition::parse(&label, linkage.n())?;
            let witness = witness_of(&label, &linkage)?;
            let read_back = label_of(&witness, &linkage)?;
            if read_back != label {
                return Err(CliError::Domain(format!(
                    "round-trip failed: witness of {label} reads back as {read_back}"
                )));
            }
            let value = json!({
                "label": label.to_string(),
                "points": witness.points(),
            });
            println!("{value}");
            if let Some(path) = svg {
                fs::write(&path, witness.to_svg()).map_err(|e| CliError::Domain(e.to_string()))?;
            }
            Ok(())
        }
        Command::Verify {
            lengths,
            level,
            force,
            allow_large,
            inject_fault,
        } => {
            let (_, mut complex) = build_complex(&lengths, force, allow_large)?;
            if inject_fault {
                complex.corrupt_incidence_for_tests();
            }
            let level = match level {
                Level::Fast => VerifyLevel::Fast,
                Level::Full => VerifyLevel::Full,
            };
            let report = run_suite(&complex, level);
            for check in &report.checks {
                if check.passed {
                    println!("check {}: ok", check.name);
                } else {
                    println!("check {}: FAIL ({})", check.name, check.detail);
                }
            }
            match report.first_failure() {
                None => {
                    println!("all checks passed");
                    Ok(())
                }
                Some(first) => Err(CliError::Domain(format!(
                    "invariant violated: {}",
                    first.name
                ))),
            }
        }
        Command::Polytope { which } => {
            match which {
                PolytopeCommand::Permutohedron { m } => {
                    if m == 0 || m > 8 {
                        return Err(CliError::Usage("m must be in 1..=8".into()));
                    }
                    let lattice = PermutohedronLattice::new(m)?;
                    println!("{}", lattice.to_json());
                }
                PolytopeCommand::Cyclic { n, d } => {
                    if n > 20 {
                        return Err(CliError::Usage("n must be at most 20".into()));
                    }
                    let facets = cyclic_facets(n, d)?;
                    println!("{}", facets.to_json());
                }
            }
            Ok(())
        }
        Command::Export {
            lengths,
            out,
            force,
            allow_large,
        } => {
            let (_, complex) = build_complex(&lengths, force, allow_large)?;
            let payload = format!("{}\n", complex.to_json());
            match out {
                Some(path) => {
                    fs::write(&path, payload).map_err(|e| CliError::Domain(e.to_string()))?;
                    println!("wrote {}", path.display());
                }
                None => print!("{payload}"),
            }
            Ok(())
        }
    }
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
    out
}
