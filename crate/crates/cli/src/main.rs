use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use matlis::constructors::{ModuleRecipe, WindowSpec, ZOO};
use matlis::derham::{derham_cohomology, koszul_homology};
use matlis::dual::matlis_dual;
use matlis::gmodule::{is_eulerian, validate, GradedPresentation, GradingMode};
use matlis::linalg::format_rational;
use matlis::verify::{verify_all, verify_noninjectivity, verify_theorem, TheoremReport, Verdict, THEOREMS};

#[derive(Parser)]
#[command(name = "matlis", version, about = "Graded D-modules: de Rham cohomology and Matlis duality")]
struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    parallel: Option<usize>,

    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    out: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Coarse,
    Fine,
}

#[derive(Args)]
struct ModuleArgs {
    /// e.g. "E(n=2)", "Hvars(n=3,S=1,2)", "shift(R(n=1),-2)", "sum(E(n=2),E(n=2))", "XD"
    #[arg(long)]
    recipe: String,

    /// Box override: "lo..hi" on every axis, or "a,b x c,d" per axis
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,

    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a presentation and print it
    Build(ModuleArgs),
    /// De Rham cohomology table
    Derham {
        #[command(flatten)]
        module: ModuleArgs,
        /// Homological Koszul homology instead
        #[arg(long)]
        koszul: bool,
    },
    /// Graded Matlis dual
    Dual(ModuleArgs),
    /// Euler operator check on the module and its dual
    Eulerian(ModuleArgs),
    /// Run theorem checks
    Verify {
        #[arg(long, default_value = "all")]
        theorem: String,
        #[arg(long)]
        recipe: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Every check on every zoo module
        #[arg(long, conflicts_with_all = ["recipe", "window", "mode"])]
        all: bool,
    },
    /// List the zoo recipes
    Zoo,
}

struct Usage(String);

fn build(recipe: &str, window: Option<&str>, mode: Option<Mode>) -> Result<GradedPresentation, Usage> {
    let r = ModuleRecipe::parse(recipe).map_err(|e| Usage(e.to_string()))?;
    let w = window
        .map(WindowSpec::parse)
        .transpose()
        .map_err(|e| Usage(e.to_string()))?;
    let mode = mode.map(|m| match m {
        Mode::Coarse => GradingMode::Coarse,
        Mode::Fine => GradingMode::Fine,
    });
    r.build(mode, w.as_ref()).map_err(|e| Usage(e.to_string()))
}

fn build_module(args: &ModuleArgs) -> Result<GradedPresentation, Usage> {
    build(&args.recipe, args.window.as_deref(), args.mode)
}

fn presentation_text(m: &GradedPresentation) -> String {
    let w = m.window();
    let mut out = format!(
        "n = {}, mode = {}, box [{}, {}]\n",
        m.n(),
        m.spec().mode(),
        w.lo(),
        w.hi()
    );
    for (a, d) in m.dims() {
        if *d == 0 {
            continue;
        }
        match m.basis_names() {
            Some(names) => out.push_str(&format!("  {a}: {d}  [{}]\n", names[a].join(", "))),
            None => out.push_str(&format!("  {a}: {d}\n")),
        }
    }
    out
}

fn presentation_csv(m: &GradedPresentation) -> String {
    let mut out = String::from("label,dim\n");
    for (a, d) in m.dims() {
        let label = if a.rank() == 1 { a.to_string() } else { format!("\"{a}\"") };
        out.push_str(&format!("{label},{d}\n"));
    }
    out
}

fn print_presentation(m: &GradedPresentation, out: Format) {
    match out {
        Format::Json => println!("{}", m.to_json()),
        Format::Csv => print!("{}", presentation_csv(m)),
        Format::Text => print!("{}", presentation_text(m)),
    }
}

fn print_reports(reports: &[TheoremReport], out: Format) {
    match out {
        Format::Json => println!("{}", serde_json::to_string_pretty(reports).expect("serializable")),
        Format::Csv => {
            println!("theorem,recipe,verdict");
            for r in reports {
                let v = serde_json::to_value(r.verdict).unwrap();
                println!("{},\"{}\",{}", r.theorem, r.recipe, v.as_str().unwrap());
            }
        }
        Format::Text => {
            for r in reports {
                let v = serde_json::to_value(r.verdict).unwrap();
                println!("{:<20} {:<14} {:<28} {} | {}", v.as_str().unwrap(), r.theorem, r.recipe, r.left, r.right);
                for note in &r.notes {
                    println!("    {note}");
                }
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Usage> {
    match cli.command {
        Command::Build(args) => {
            let m = build_module(&args)?;
            print_presentation(&m, cli.out);
        }
        Command::Derham { module, koszul } => {
            let m = build_module(&module)?;
            let table = if koszul { koszul_homology(&m, false) } else { derham_cohomology(&m) };
            match cli.out {
                Format::Json => println!("{}", table.to_json()),
                Format::Csv => print!("{}", table.to_csv()),
                Format::Text => print!("{}", table.to_text()),
            }
        }
        Command::Dual(args) => {
            let m = build_module(&args)?;
            print_presentation(&matlis_dual(&m), cli.out);
        }
        Command::Eulerian(args) => {
            let m = build_module(&args)?;
            let report = is_eulerian(&m);
            let dual = report.eulerian.then(|| is_eulerian(&matlis_dual(&m)).eulerian);
            let witness = report.witness.as_ref().map(|(a, diff)| {
                let entries: Vec<_> = diff
                    .entries()
                    .map(|(r, c, v)| json!([r, c, format_rational(v)]))
                    .collect();
                json!({"label": a, "rows": diff.rows(), "cols": diff.cols(), "entries": entries})
            });
            let v = json!({
                "recipe": args.recipe,
                "eulerian": report.eulerian,
                "witness": witness,
                "checked": report.checked,
                "dual_eulerian": dual,
                "valid": validate(&m).is_ok(),
            });
            match cli.out {
                Format::Json => println!("{}", serde_json::to_string_pretty(&v).unwrap()),
                Format::Csv => println!(
                    "recipe,eulerian,dual_eulerian\n\"{}\",{},{}",
                    args.recipe,
                    report.eulerian,
                    dual.map_or("".into(), |d| d.to_string())
                ),
                Format::Text => {
                    println!("eulerian: {}", report.eulerian);
                    if let Some((a, _)) = &report.witness {
                        println!("witness label: {a}");
                    }
                    if let Some(d) = dual {
                        println!("dual eulerian: {d}");
                    }
                }
            }
        }
        Command::Verify {
            theorem,
            recipe,
            window,
            mode,
            all,
        } => {
            if theorem != "all" && !THEOREMS.contains(&theorem.as_str()) {
                return Err(Usage(format!(
                    "unknown theorem {theorem:?}; expected one of all, {}",
                    THEOREMS.join(", ")
                )));
            }
            let reports: Vec<TheoremReport> = if all {
                verify_all()
                    .into_iter()
                    .filter(|r| theorem == "all" || r.theorem == theorem)
                    .collect()
            } else if let Some(recipe) = recipe {
                let m = build(&recipe, window.as_deref(), mode)?;
                if theorem == "all" {
                    let mut v: Vec<TheoremReport> = THEOREMS
                        .iter()
                        .filter(|&&t| t != "noninjectivity")
                        .filter(|&&t| t != "eulerian" || is_eulerian(&m).eulerian)
                        .map(|t| verify_theorem(t, &m, &recipe).unwrap())
                        .collect();
                    if recipe == "XD" {
                        v.push(verify_noninjectivity());
                    }
                    v
                } else {
                    vec![verify_theorem(&theorem, &m, &recipe).unwrap()]
                }
            } else if theorem == "noninjectivity" {
                vec![verify_noninjectivity()]
            } else {
                return Err(Usage("verify needs --recipe or --all".into()));
            };
            print_reports(&reports, cli.out);
            if reports.iter().any(|r| r.verdict != Verdict::Pass) {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Zoo => match cli.out {
            Format::Json => println!("{}", serde_json::to_string_pretty(ZOO).unwrap()),
            _ => ZOO.iter().for_each(|r| println!("{r}")),
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.parallel {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
