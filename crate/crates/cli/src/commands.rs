//! Subcommand implementations.

use crate::cache;
use hsm_core::certify::CertifyMethod;
use hsm_core::characters::DirichletCharacter;
use hsm_core::exact::integers::is_prime_u64;
use hsm_core::hsm::pipeline::{full_run, t_prime, PipelineConfig, PipelineReport};
use hsm_core::isogeny::{build_graph, GraphRestriction};
use hsm_core::weight2::psi_index;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

/// Flag parser: positional arguments plus `--key value` and `-o value`.
fn parse_flags(args: &[String]) -> Result<(Vec<String>, HashMap<String, String>), String> {
    let mut pos = Vec::new();
    let mut flags = HashMap::new();
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if let Some(key) = a.strip_prefix("--") {
            let val = args
                .get(i + 1)
                .ok_or_else(|| format!("flag --{key} needs a value"))?;
            flags.insert(key.to_string(), val.clone());
            i += 2;
        } else if a == "-o" {
            let val = args.get(i + 1).ok_or("-o needs a value")?;
            flags.insert("o".to_string(), val.clone());
            i += 2;
        } else {
            pos.push(a.clone());
            i += 1;
        }
    }
    Ok((pos, flags))
}

fn write_output(flags: &HashMap<String, String>, content: &str) -> Result<(), String> {
    match flags.get("o") {
        Some(path) => std::fs::write(path, content).map_err(|e| e.to_string()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RunManifest {
    command: String,
    tool_version: String,
    config: String,
    input_hashes: Vec<String>,
    wall_ms: u128,
    output_path: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RunDocument {
    manifest: RunManifest,
    report: PipelineReport,
    t_prime: Option<String>,
}

pub fn cmd_run(args: &[String]) -> Result<u8, String> {
    let (pos, flags) = parse_flags(args)?;
    if pos.len() != 2 {
        return Err("run needs <N> and a character label <N.c>".into());
    }
    let level: u64 = pos[0].parse().map_err(|_| "bad level")?;
    let chi = DirichletCharacter::parse_label(&pos[1]).map_err(|e| e.to_string())?;
    if chi.modulus() != level {
        return Err(format!(
            "character modulus {} does not match the level {level}",
            chi.modulus()
        ));
    }
    if !chi.is_odd() {
        return Err("the pipeline needs an odd character".into());
    }
    let mut config = PipelineConfig::new(chi).map_err(|e| e.to_string())?;
    if let Some(l) = flags.get("ell") {
        let ell: u64 = l.parse().map_err(|_| "bad --ell")?;
        if !is_prime_u64(ell) {
            return Err("--ell must be prime".into());
        }
        config = config.with_ell(ell).map_err(|e| e.to_string())?;
    }
    if let Some(p) = flags.get("precision") {
        let precision: i64 = p.parse().map_err(|_| "bad --precision")?;
        config = config.with_precision(precision);
    }
    if let Some(ps) = flags.get("primes") {
        for tok in ps.split(',') {
            let p: u64 = tok.trim().parse().map_err(|_| "bad --primes entry")?;
            if !is_prime_u64(p) {
                return Err(format!("{p} in --primes is not prime"));
            }
            config.extra_primes.push(p);
        }
    }
    if let Some(m) = flags.get("certify-method") {
        config.certify_method =
            CertifyMethod::parse(m).ok_or("bad --certify-method (auto|a|ii|iii|phi2|d)")?;
    }
    let dir = cache::cache_dir(flags.get("cache").map(|s| s.as_str()));
    let start = std::time::Instant::now();
    // report cache keyed by the configuration
    let config_key = format!(
        "run {} {} ell={} P={} primes={:?} method={:?}",
        config.level,
        config.chi.label(),
        config.ell,
        config.precision,
        config.extra_primes,
        config.certify_method,
    );
    let report_key = cache::fnv1a(config_key.as_bytes());
    let report_file = cache::report_path(&dir, report_key);
    let cached: Option<PipelineReport> = std::fs::read_to_string(&report_file)
        .ok()
        .and_then(|text| serde_json::from_str::<RunDocument>(&text).ok())
        .map(|d| d.report);
    let (report, basis_hash) = match cached {
        Some(r) => {
            eprintln!("(report loaded from cache {})", report_file.display());
            (r, "cached".to_string())
        }
        None => {
            let basis = cache::basis_with_precision(&dir, config.level, config.precision);
            let text = hsm_core::weight2::io::format_basis(&basis);
            let h = format!("{:016x}", cache::fnv1a(text.as_bytes()));
            let report = full_run(&config, &basis).map_err(|e| e.to_string())?;
            (report, h)
        }
    };
    let tp = if config.chi.is_quadratic() {
        Some(factorization_string(&t_prime(&report)))
    } else {
        None
    };
    let exit = if report.all_certified() { 0u8 } else { 2u8 };
    let manifest = RunManifest {
        command: format!("run {}", args.join(" ")),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config_key.clone(),
        input_hashes: vec![format!("s2-basis:{basis_hash}")],
        wall_ms: start.elapsed().as_millis(),
        output_path: flags.get("o").cloned(),
    };
    let doc = RunDocument {
        manifest,
        report,
        t_prime: tp,
    };
    let out_kind = flags.get("out").map(|s| s.as_str()).unwrap_or("json");
    let content = match out_kind {
        "json" => {
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
            s.push('\n');
            s
        }
        "tsv" => run_report_tsv(&doc),
        other => return Err(format!("unknown --out format `{other}`")),
    };
    // persist the JSON document in the cache regardless of output format
    let _ = std::fs::create_dir_all(&dir);
    if let Ok(json) = serde_json::to_string_pretty(&doc) {
        let _ = std::fs::write(&report_file, json + "\n");
    }
    write_output(&flags, &content)?;
    Ok(exit)
}

fn run_report_tsv(doc: &RunDocument) -> String {
    let r = &doc.report;
    let mut out = String::new();
    out.push_str("level\tcharacter\tell\tprecision\tdim_char0\teisenstein_dim\n");
    out.push_str(&format!(
        "{}\t{}\t{}\t{}\t{}\t{}\n",
        r.level, r.character, r.ell, r.precision, r.dim_char0, r.eisenstein_dim
    ));
    out.push_str("p\tf\tdim\tjump\tcertified\tmethods\n");
    for s in &r.slots {
        let methods: Vec<String> = s
            .certifications
            .iter()
            .map(|c| {
                format!(
                    "{}:{}{}",
                    c.method,
                    if c.pass { "pass" } else { "fail" },
                    if c.conditional { "?" } else { "" }
                )
            })
            .collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            s.p,
            s.f,
            s.dim,
            s.jump,
            s.certifications.iter().any(|c| c.pass && !c.conditional),
            methods.join(",")
        ));
    }
    out
}

fn factorization_string(n: &BigUint) -> String {
    use num_traits::One;
    if n.is_one() {
        return "1".to_string();
    }
    let f = hsm_core::exact::integers::factor_integer(n);
    let mut parts: Vec<String> = f
        .factors
        .iter()
        .map(|(p, e)| {
            if *e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect();
    for c in &f.unresolved {
        parts.push(format!("{c}?"));
    }
    parts.join("*")
}

/// t' table rows for the conductor-3 quadratic family at levels N = 3v.
pub fn cmd_table(args: &[String]) -> Result<u8, String> {
    let (pos, flags) = parse_flags(args)?;
    if pos.len() != 1 {
        return Err("table needs a level list `N1,N2,...` or a range `A..B`".into());
    }
    let levels = parse_levels(&pos[0])?;
    let dir = cache::cache_dir(flags.get("cache").map(|s| s.as_str()));
    let eps3 = DirichletCharacter::enumerate(3)
        .into_iter()
        .find(|c| c.is_odd())
        .expect("quadratic character mod 3");
    let mut out = String::new();
    out.push_str("N\tt_prime\tlog_t_prime_over_index\n");
    for n in levels {
        if n % 3 != 0 || !is_prime_u64(n / 3) || n / 3 == 3 {
            eprintln!("skipping N = {n}: not of the form 3v with v prime");
            continue;
        }
        let chi = eps3.clone().induce(n);
        let config = PipelineConfig::new(chi).map_err(|e| e.to_string())?;
        let basis = cache::basis_with_precision(&dir, n, config.precision);
        let report = full_run(&config, &basis).map_err(|e| e.to_string())?;
        let tp = t_prime(&report);
        let ratio = {
            use num_traits::ToPrimitive;
            let v = tp.to_f64().unwrap_or(f64::INFINITY).ln();
            v / psi_index(n) as f64
        };
        out.push_str(&format!(
            "{}\t{}\t{:.6}\n",
            n,
            factorization_string(&tp),
            ratio
        ));
    }
    write_output(&flags, &out)?;
    Ok(0)
}

fn parse_levels(spec: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = spec.split_once("..") {
        let a: u64 = a.parse().map_err(|_| "bad range start")?;
        let b: u64 = b.parse().map_err(|_| "bad range end")?;
        Ok((a..=b).collect())
    } else {
        spec.split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| "bad level".to_string()))
            .collect()
    }
}

/// rd(K_f) = (N / f)^{(p-1)/p} * f^{1/2}, shown to 6 significant digits.
pub fn cmd_rootdisc(args: &[String]) -> Result<u8, String> {
    let (pos, _flags) = parse_flags(args)?;
    if pos.len() != 3 {
        return Err("rootdisc needs <N> <f_chi> <p>".into());
    }
    let n: f64 = pos[0].parse().map_err(|_| "bad N")?;
    let f: f64 = pos[1].parse().map_err(|_| "bad f_chi")?;
    let p: f64 = pos[2].parse().map_err(|_| "bad p")?;
    if (n / f).fract() != 0.0 {
        return Err("f_chi must divide N".into());
    }
    let rd = (n / f).powf((p - 1.0) / p) * f.sqrt();
    println!("{}", six_significant(rd));
    Ok(0)
}

fn six_significant(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".into();
    }
    let digits_before = x.abs().log10().floor() as i32 + 1;
    let decimals = (6 - digits_before).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn cmd_basis(args: &[String]) -> Result<u8, String> {
    let (pos, flags) = parse_flags(args)?;
    let dir = cache::cache_dir(flags.get("cache").map(|s| s.as_str()));
    match pos.first().map(|s| s.as_str()) {
        Some("export") => {
            let n: u64 = pos
                .get(1)
                .ok_or("basis export needs <N>")?
                .parse()
                .map_err(|_| "bad N")?;
            let precision: i64 = flags
                .get("precision")
                .map(|s| s.parse().map_err(|_| "bad --precision"))
                .transpose()?
                .unwrap_or_else(|| hsm_core::hsm::sturm(2, n) + 1);
            let basis = cache::basis_with_precision(&dir, n, precision);
            let text = hsm_core::weight2::io::format_basis(&basis.truncate(precision));
            write_output(&flags, &text)?;
            Ok(0)
        }
        Some("import") => {
            let path = pos.get(1).ok_or("basis import needs <FILE>")?;
            let (basis, warnings) =
                hsm_core::weight2::load_basis(Path::new(path)).map_err(|e| e.to_string())?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
            let dest = cache::basis_path(&dir, basis.level, basis.weight, basis.precision);
            hsm_core::weight2::save_basis(&dest, &basis).map_err(|e| e.to_string())?;
            eprintln!(
                "imported basis for level {} at precision {} -> {}",
                basis.level,
                basis.precision,
                dest.display()
            );
            Ok(0)
        }
        _ => Err("basis needs `export` or `import`".into()),
    }
}

pub fn cmd_graph(args: &[String]) -> Result<u8, String> {
    let (pos, flags) = parse_flags(args)?;
    if pos.len() != 2 {
        return Err("graph needs <p> <ell>".into());
    }
    let p: u64 = pos[0].parse().map_err(|_| "bad p")?;
    let ell: u64 = pos[1].parse().map_err(|_| "bad ell")?;
    if !is_prime_u64(p) || !is_prime_u64(ell) {
        return Err("p and ell must be prime".into());
    }
    let restrict = match flags.get("restrict").map(|s| s.as_str()).unwrap_or("ss") {
        "all" => GraphRestriction::All,
        "ss" | "supersingular" => GraphRestriction::Supersingular,
        other => return Err(format!("unknown --restrict `{other}`")),
    };
    let g = build_graph(p, ell, restrict)?;
    write_output(&flags, &g.edge_list())?;
    Ok(0)
}
