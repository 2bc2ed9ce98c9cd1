//! Command-line front end: builds algebra elements, dynamics and Bargmann
//! objects from flags or JSON files, runs the diagnostics, and emits
//! deterministic CSV/JSON documents.
//!
//! Exit codes: 0 success, 1 numeric-tolerance failure (a measured
//! deviation above --tolerance), 2 usage or input error.

use num_complex::Complex64;

use qtorus::bargmann::{
    basis_gram, kernel_plot_csv, recover_dft_matrix, verify_dft_lemma, ThetaSeriesParams,
};
use qtorus::dynamics::{apply_automorphism, ergodicity_sweep, mixing_sweep, ToralAutomorphism};
use qtorus::quantize::{egorov_defect, TorusSymbol};
use qtorus::theta_rep::{represent, sector_generators, ThetaPoint};
use qtorus::{AlgebraElement, PlanckParameter, WeylIndex};

pub const USAGE: &str = "\
qtorus - quantized torus diagnostics

USAGE: qtorus <command> [flags]

COMMANDS
  trace        tau of an element               --in a.json
  evolve       apply alpha_n to an element     --in a.json | --n N --a m,k; --map MAP --steps n
  ergodicity   defect sweep over M             --n N --map MAP --a m,k --max-steps M
  mixing       correlation sweep over n        --n N --map MAP --a m,k --b m,k --steps S
  sector       sector matrix at theta          --n N --theta t1,t2 (--gen u|v | --in a.json)
  dft-check    position/momentum DFT check     --n N --theta t1,t2 [--truncation K] [--tolerance T]
  kernel-plot  |g(r/2hbar)|^2 over r in [-5,5] --h H [--figure-convention]
  basis-check  basis Gram matrix vs identity   --n N --theta t1,t2 [--grid G] [--tolerance T]
  egorov       one-step Egorov defect          --n N --map MAP (--in f.json | --mode m,k)

COMMON FLAGS
  --map cat:a,b,c,d | kronecker:t1,t2   dynamics (cat determinant must be 1)
  --a m,k / --b m,k / --mode m,k        Weyl/Fourier indices
  --theta t1,t2                         sector point, components taken mod 1
  --output json|csv                     output format (default csv)
  --out FILE                            write the document to FILE instead of stdout
  --tolerance T                         pass/fail threshold (default 1e-8; exit 1 above it)
  --truncation K                        comb truncation (default 50)
  --grid G                              quadrature grid per side (default 200)

CONVENTIONS
  kernel-plot uses hbar = h/(2 pi); with --figure-convention it instead
  sets hbar := h, reproducing the plotted curves for h = 1/10, 1/100.
  All floats are printed with 17 significant digits, so identical
  invocations produce byte-identical output.
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum ElementSource {
    File(String),
    Monomial { n: u32, index: (i64, i64) },
}

#[derive(Debug, Clone)]
pub enum SectorSource {
    GeneratorU,
    GeneratorV,
    File(String),
}

#[derive(Debug, Clone)]
pub enum SymbolSource {
    File(String),
    Mode((i64, i64)),
}

#[derive(Debug, Clone)]
pub enum Command {
    Trace {
        input: String,
        format: Format,
    },
    Evolve {
        element: ElementSource,
        map: ToralAutomorphism,
        steps: i64,
    },
    Ergodicity {
        n: u32,
        map: ToralAutomorphism,
        a: (i64, i64),
        max_steps: u32,
        format: Format,
    },
    Mixing {
        n: u32,
        map: ToralAutomorphism,
        a: (i64, i64),
        b: (i64, i64),
        steps: u32,
        format: Format,
    },
    Sector {
        n: u32,
        theta: (f64, f64),
        source: SectorSource,
        format: Format,
    },
    DftCheck {
        n: u32,
        theta: (f64, f64),
        truncation: u32,
        tolerance: f64,
        format: Format,
    },
    KernelPlot {
        h: f64,
        figure_convention: bool,
    },
    BasisCheck {
        n: u32,
        theta: (f64, f64),
        grid: u32,
        tolerance: f64,
        format: Format,
    },
    Egorov {
        n: u32,
        map: ToralAutomorphism,
        symbol: SymbolSource,
        format: Format,
    },
}

/// A parsed, validated invocation.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub out: Option<String>,
}

/// The outcome of a command: the output document plus the exit code.
#[derive(Debug, Clone)]
pub struct Report {
    pub exit_code: i32,
    pub body: String,
}

struct Flags {
    pairs: Vec<(String, Option<String>)>,
}

impl Flags {
    fn parse(args: &[String], allowed: &[&str], booleans: &[&str]) -> Result<Self, String> {
        let mut pairs = Vec::new();
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            let Some(name) = arg.strip_prefix("--") else {
                return Err(format!("unexpected argument '{arg}'"));
            };
            if !allowed.contains(&name) && name != "out" {
                return Err(format!("unknown flag '--{name}'"));
            }
            if booleans.contains(&name) {
                pairs.push((name.to_string(), None));
            } else {
                let value = it
                    .next()
                    .ok_or_else(|| format!("flag '--{name}' needs a value"))?;
                pairs.push((name.to_string(), Some(value.clone())));
            }
        }
        Ok(Self { pairs })
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| k == name)
            .and_then(|(_, v)| v.as_deref())
    }

    fn has(&self, name: &str) -> bool {
        self.pairs.iter().any(|(k, _)| k == name)
    }

    fn require(&self, name: &str) -> Result<&str, String> {
        self.get(name)
            .ok_or_else(|| format!("missing required flag '--{name}'"))
    }
}

fn parse_u32(flags: &Flags, name: &str) -> Result<u32, String> {
    flags
        .require(name)?
        .parse()
        .map_err(|_| format!("flag '--{name}' must be a positive integer"))
}

fn parse_u32_default(flags: &Flags, name: &str, default: u32) -> Result<u32, String> {
    match flags.get(name) {
        None => Ok(default),
        Some(s) => s
            .parse()
            .map_err(|_| format!("flag '--{name}' must be a positive integer")),
    }
}

fn parse_f64_default(flags: &Flags, name: &str, default: f64) -> Result<f64, String> {
    match flags.get(name) {
        None => Ok(default),
        Some(s) => s
            .parse()
            .map_err(|_| format!("flag '--{name}' must be a number")),
    }
}

fn parse_index_pair(value: &str, name: &str) -> Result<(i64, i64), String> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("flag '--{name}' expects 'm,k'"));
    }
    let m = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("flag '--{name}': '{}' is not an integer", parts[0]))?;
    let k = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("flag '--{name}': '{}' is not an integer", parts[1]))?;
    Ok((m, k))
}

fn parse_theta(flags: &Flags) -> Result<(f64, f64), String> {
    let value = flags.require("theta")?;
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 2 {
        return Err("flag '--theta' expects 't1,t2'".into());
    }
    let t1 = parts[0]
        .trim()
        .parse()
        .map_err(|_| "flag '--theta': components must be numbers".to_string())?;
    let t2 = parts[1]
        .trim()
        .parse()
        .map_err(|_| "flag '--theta': components must be numbers".to_string())?;
    Ok((t1, t2))
}

fn parse_map(flags: &Flags) -> Result<ToralAutomorphism, String> {
    let value = flags.require("map")?;
    if let Some(body) = value.strip_prefix("cat:") {
        let nums: Vec<&str> = body.split(',').collect();
        if nums.len() != 4 {
            return Err("flag '--map': cat expects 'cat:a,b,c,d'".into());
        }
        let mut parsed = [0i64; 4];
        for (slot, s) in parsed.iter_mut().zip(&nums) {
            *slot = s
                .trim()
                .parse()
                .map_err(|_| format!("flag '--map': '{s}' is not an integer"))?;
        }
        ToralAutomorphism::cat_map(parsed[0], parsed[1], parsed[2], parsed[3])
            .map_err(|e| e.to_string())
    } else if let Some(body) = value.strip_prefix("kronecker:") {
        let nums: Vec<&str> = body.split(',').collect();
        if nums.len() != 2 {
            return Err("flag '--map': kronecker expects 'kronecker:t1,t2'".into());
        }
        let t1 = nums[0]
            .trim()
            .parse()
            .map_err(|_| "flag '--map': shifts must be numbers".to_string())?;
        let t2 = nums[1]
            .trim()
            .parse()
            .map_err(|_| "flag '--map': shifts must be numbers".to_string())?;
        Ok(ToralAutomorphism::kronecker(t1, t2))
    } else {
        Err("flag '--map' expects 'cat:a,b,c,d' or 'kronecker:t1,t2'".into())
    }
}

fn parse_format(flags: &Flags) -> Result<Format, String> {
    match flags.get("output") {
        None => Ok(Format::Csv),
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(format!("flag '--output': unknown format '{other}'")),
    }
}

/// Parses an argument list (without the binary name) into an invocation.
/// Unknown commands, unknown flags, missing or malformed values are all
/// usage errors (exit code 2).
pub fn parse(args: &[String]) -> Result<Invocation, String> {
    let Some(command) = args.first() else {
        return Err("missing command".into());
    };
    let rest = &args[1..];
    let command = match command.as_str() {
        "trace" => {
            let flags = Flags::parse(rest, &["in", "output"], &[])?;
            Command::Trace {
                input: flags.require("in")?.to_string(),
                format: parse_format(&flags)?,
            }
        }
        "evolve" => {
            let flags = Flags::parse(rest, &["in", "n", "a", "map", "steps"], &[])?;
            let element = if let Some(path) = flags.get("in") {
                ElementSource::File(path.to_string())
            } else {
                ElementSource::Monomial {
                    n: parse_u32(&flags, "n")?,
                    index: parse_index_pair(flags.require("a")?, "a")?,
                }
            };
            Command::Evolve {
                element,
                map: parse_map(&flags)?,
                steps: flags
                    .require("steps")?
                    .parse()
                    .map_err(|_| "flag '--steps' must be an integer".to_string())?,
            }
        }
        "ergodicity" => {
            let flags = Flags::parse(rest, &["n", "map", "a", "max-steps", "output"], &[])?;
            // validate the map first: a bad matrix is a clearer complaint
            // than a missing sibling flag
            let map = parse_map(&flags)?;
            Command::Ergodicity {
                n: parse_u32(&flags, "n")?,
                map,
                a: parse_index_pair(flags.require("a")?, "a")?,
                max_steps: parse_u32(&flags, "max-steps")?,
                format: parse_format(&flags)?,
            }
        }
        "mixing" => {
            let flags = Flags::parse(rest, &["n", "map", "a", "b", "steps", "output"], &[])?;
            let map = parse_map(&flags)?;
            Command::Mixing {
                n: parse_u32(&flags, "n")?,
                map,
                a: parse_index_pair(flags.require("a")?, "a")?,
                b: parse_index_pair(flags.require("b")?, "b")?,
                steps: parse_u32(&flags, "steps")?,
                format: parse_format(&flags)?,
            }
        }
        "sector" => {
            let flags = Flags::parse(rest, &["n", "theta", "gen", "in", "output"], &[])?;
            let source = match (flags.get("gen"), flags.get("in")) {
                (Some("u"), None) => SectorSource::GeneratorU,
                (Some("v"), None) => SectorSource::GeneratorV,
                (Some(other), None) => {
                    return Err(format!("flag '--gen': expected 'u' or 'v', got '{other}'"))
                }
                (None, Some(path)) => SectorSource::File(path.to_string()),
                (None, None) => return Err("sector needs '--gen u|v' or '--in FILE'".into()),
                (Some(_), Some(_)) => return Err("sector takes '--gen' or '--in', not both".into()),
            };
            Command::Sector {
                n: parse_u32(&flags, "n")?,
                theta: parse_theta(&flags)?,
                source,
                format: parse_format(&flags)?,
            }
        }
        "dft-check" => {
            let flags = Flags::parse(
                rest,
                &["n", "theta", "truncation", "tolerance", "output"],
                &[],
            )?;
            Command::DftCheck {
                n: parse_u32(&flags, "n")?,
                theta: parse_theta(&flags)?,
                truncation: parse_u32_default(&flags, "truncation", 50)?,
                tolerance: parse_f64_default(&flags, "tolerance", 1e-8)?,
                format: parse_format(&flags)?,
            }
        }
        "kernel-plot" => {
            let flags = Flags::parse(rest, &["h", "figure-convention"], &["figure-convention"])?;
            let h: f64 = flags
                .require("h")?
                .parse()
                .map_err(|_| "flag '--h' must be a number".to_string())?;
            if h <= 0.0 {
                return Err("flag '--h' must be positive".into());
            }
            Command::KernelPlot {
                h,
                figure_convention: flags.has("figure-convention"),
            }
        }
        "basis-check" => {
            let flags = Flags::parse(rest, &["n", "theta", "grid", "tolerance", "output"], &[])?;
            Command::BasisCheck {
                n: parse_u32(&flags, "n")?,
                theta: parse_theta(&flags)?,
                grid: parse_u32_default(&flags, "grid", 200)?,
                tolerance: parse_f64_default(&flags, "tolerance", 1e-8)?,
                format: parse_format(&flags)?,
            }
        }
        "egorov" => {
            let flags = Flags::parse(rest, &["n", "map", "in", "mode", "output"], &[])?;
            let map = parse_map(&flags)?;
            let symbol = match (flags.get("in"), flags.get("mode")) {
                (Some(path), None) => SymbolSource::File(path.to_string()),
                (None, Some(mode)) => SymbolSource::Mode(parse_index_pair(mode, "mode")?),
                (None, None) => return Err("egorov needs '--in FILE' or '--mode m,k'".into()),
                (Some(_), Some(_)) => {
                    return Err("egorov takes '--in' or '--mode', not both".into())
                }
            };
            Command::Egorov {
                n: parse_u32(&flags, "n")?,
                map,
                symbol,
                format: parse_format(&flags)?,
            }
        }
        other => return Err(format!("unknown command '{other}'")),
    };
    Ok(Invocation {
        command,
        out: extract_out(rest),
    })
}

fn extract_out(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--out" {
            return it.next().cloned();
        }
    }
    None
}

fn scalar_doc(name: &str, value: f64, format: Format) -> String {
    match format {
        Format::Csv => format!("{name}\n{value:.16e}\n"),
        Format::Json => format!("{{\"{name}\": {value:.16e}}}"),
    }
}

fn complex_doc(name: &str, value: Complex64, format: Format) -> String {
    match format {
        Format::Csv => format!("{name}_re,{name}_im\n{:.16e},{:.16e}\n", value.re, value.im),
        Format::Json => format!(
            "{{\"{name}_re\": {:.16e}, \"{name}_im\": {:.16e}}}",
            value.re, value.im
        ),
    }
}

/// Runs a validated invocation and produces its report. Input-side
/// failures (unreadable files, malformed JSON, mismatched parameters)
/// come back as Err and map to exit code 2.
pub fn execute(inv: &Invocation) -> Result<Report, String> {
    let ok = |body: String| Report { exit_code: 0, body };
    match &inv.command {
        Command::Trace { input, format } => {
            let text = std::fs::read_to_string(input)
                .map_err(|e| format!("cannot read '{input}': {e}"))?;
            let element = AlgebraElement::from_json(&text).map_err(|e| e.to_string())?;
            Ok(ok(complex_doc("trace", element.trace(), *format)))
        }
        Command::Evolve {
            element,
            map,
            steps,
        } => {
            let element = match element {
                ElementSource::File(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| format!("cannot read '{path}': {e}"))?;
                    AlgebraElement::from_json(&text).map_err(|e| e.to_string())?
                }
                ElementSource::Monomial { n, index } => {
                    let planck = PlanckParameter::new(*n).map_err(|e| e.to_string())?;
                    AlgebraElement::monomial(WeylIndex::new(index.0, index.1), planck)
                }
            };
            let moved = apply_automorphism(map, &element, *steps);
            Ok(ok(moved.to_json()))
        }
        Command::Ergodicity {
            n,
            map,
            a,
            max_steps,
            format,
        } => {
            let planck = PlanckParameter::new(*n).map_err(|e| e.to_string())?;
            let element = AlgebraElement::monomial(WeylIndex::new(a.0, a.1), planck);
            let report = ergodicity_sweep(map, &element, *max_steps).map_err(|e| e.to_string())?;
            Ok(ok(match format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json(),
            }))
        }
        Command::Mixing {
            n,
            map,
            a,
            b,
            steps,
            format,
        } => {
            let planck = PlanckParameter::new(*n).map_err(|e| e.to_string())?;
            let ea = AlgebraElement::monomial(WeylIndex::new(a.0, a.1), planck);
            let eb = AlgebraElement::monomial(WeylIndex::new(b.0, b.1), planck);
            let report = mixing_sweep(map, &ea, &eb, *steps).map_err(|e| e.to_string())?;
            Ok(ok(match format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json(),
            }))
        }
        Command::Sector {
            n,
            theta,
            source,
            format,
        } => {
            let planck = PlanckParameter::new(*n).map_err(|e| e.to_string())?;
            let theta = ThetaPoint::new(theta.0, theta.1);
            let matrix = match source {
                SectorSource::GeneratorU => sector_generators(&planck, &theta).0,
                SectorSource::GeneratorV => sector_generators(&planck, &theta).1,
                SectorSource::File(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| format!("cannot read '{path}': {e}"))?;
                    let element = AlgebraElement::from_json(&text).map_err(|e| e.to_string())?;
                    if element.planck().n() != *n {
                        return Err(format!(
                            "element has N = {}, but --n is {n}",
                            element.planck().n()
                        ));
                    }
                    represent(&element, &theta)
                }
            };
            Ok(ok(match format {
                Format::Csv => matrix.to_csv(),
                Format::Json => matrix.to_json(),
            }))
        }
        Command::DftCheck {
            n,
            theta,
            truncation,
            tolerance,
            format,
        } => {
            let planck = PlanckParameter::new(*n).map_err(|e| e.to_string())?;
            let theta = ThetaPoint::new(theta.0, theta.1);
            let deviation = verify_dft_lemma(&theta, &planck, *truncation);
            let body = match format {
                Format::Csv => scalar_doc("deviation", deviation, Format::Csv),
                Format::Json => {
                    let rec = recover_dft_matrix(&theta, &planck, *truncation);
                    format!(
                        "{{\"deviation\": {deviation:.16e}, \"recovered\": {}}}",
                        rec.to_json()
                    )
                }
            };
            Ok(Report {
                exit_code: i32::from(deviation > *tolerance),
                body,
            })
        }
        Command::KernelPlot {
            h,
            figure_convention,
        } => {
            let hbar = if *figure_convention {
                *h
            } else {
                *h / (2.0 * std::f64::consts::PI)
            };
            Ok(ok(kernel_plot_csv(hbar, 501)))
        }
        Command::BasisCheck {
            n,
            theta,
            grid,
            tolerance,
            format,
        } => {
            let planck = PlanckParameter::new(*n).map_err(|e| e.to_string())?;
            let theta = ThetaPoint::new(theta.0, theta.1);
            let gram = basis_gram(planck, theta, *grid, &ThetaSeriesParams::default())
                .map_err(|e| e.to_string())?;
            let dim = *n as usize;
            let mut deviation: f64 = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    deviation =
                        deviation.max((gram[i * dim + j] - Complex64::new(expect, 0.0)).norm());
                }
            }
            Ok(Report {
                exit_code: i32::from(deviation > *tolerance),
                body: scalar_doc("max_deviation", deviation, *format),
            })
        }
        Command::Egorov {
            n,
            map,
            symbol,
            format,
        } => {
            let planck = PlanckParameter::new(*n).map_err(|e| e.to_string())?;
            let symbol = match symbol {
                SymbolSource::File(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| format!("cannot read '{path}': {e}"))?;
                    TorusSymbol::from_json(&text).map_err(|e| e.to_string())?
                }
                SymbolSource::Mode(index) => TorusSymbol::single_mode(
                    WeylIndex::new(index.0, index.1),
                    Complex64::new(1.0, 0.0),
                ),
            };
            let defect = egorov_defect(&symbol, map, planck);
            Ok(ok(scalar_doc("defect", defect, *format)))
        }
    }
}

/// Full front end: parse, execute, write. Returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    if matches!(
        args.first().map(String::as_str),
        Some("help" | "--help" | "-h")
    ) {
        println!("{USAGE}");
        return 0;
    }
    let inv = match parse(args) {
        Ok(inv) => inv,
        Err(message) => {
            eprintln!("error: {message}\n\nrun 'qtorus help' for usage");
            return 2;
        }
    };
    let report = match execute(&inv) {
        Ok(report) => report,
        Err(message) => {
            eprintln!("error: {message}");
            return 2;
        }
    };
    match &inv.out {
        None => {
            print!("{}", report.body);
            if !report.body.ends_with('\n') {
                println!();
            }
        }
        Some(path) => {
            // stage and rename so readers never observe a partial file
            let tmp = format!("{path}.tmp");
            if let Err(e) =
                std::fs::write(&tmp, &report.body).and_then(|()| std::fs::rename(&tmp, path))
            {
                eprintln!("error: cannot write '{path}': {e}");
                return 2;
            }
        }
    }
    report.exit_code
}
