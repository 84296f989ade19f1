//! Command-line front end: argument and config-file handling plus one
//! function per subcommand, all returning deterministic text or JSON.

use crate::identities::{
    bethe_equations, degenerate_constant_q_fails, numeric_consistency, tq_relation,
    verify_counterexamples, verify_qq,
};
use crate::lweight::{parse_param, QCharacter, SpectralParam, WeightError};
use crate::qchar::{
    fm_qcharacter, fold_char, kr_qcharacter, neg_prefund_qchar, normalized_x_qchar,
    pos_prefund_qchar, Mono, DEFAULT_BUDGET,
};
use crate::repcheck::{load_builtin, verify_presentation};
use crate::report::ReportBundle;
use crate::root_data::{
    det_closed_form, det_f, det_f_prime, det_prime_closed_form, f_matrix, Ctx, SUPPORTED_TYPES,
};
use crate::suite::{run_suite, SECTIONS};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

/// Options shared by every subcommand, fed from flags and an optional
/// key=value config file (flags win).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub type_name: String,
    pub trunc: u32,
    pub node: usize,
    pub param: String,
    pub output: Option<String>,
    pub format: OutputFormat,
    pub precision_bits: u32,
    pub rest: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            type_name: "A2^2".into(),
            trunc: 4,
            node: 1,
            param: "q^0".into(),
            output: None,
            format: OutputFormat::Json,
            precision_bits: 200,
            rest: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "type" => self.type_name = value.into(),
            "trunc" => self.trunc = value.parse().map_err(|_| format!("bad trunc {value}"))?,
            "node" => self.node = value.parse().map_err(|_| format!("bad node {value}"))?,
            "param" => self.param = value.into(),
            "output" => self.output = Some(value.into()),
            "format" => {
                self.format = match value {
                    "json" => OutputFormat::Json,
                    "text" => OutputFormat::Text,
                    other => return Err(format!("unknown format {other}")),
                }
            }
            "precision-bits" | "precision_bits" => {
                self.precision_bits = value.parse().map_err(|_| format!("bad precision {value}"))?
            }
            other => {
                self.rest.insert(other.into(), value.into());
            }
        }
        Ok(())
    }

    fn load_file(&mut self, path: &str) -> Result<(), String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("config {path}: {e}"))?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("bad config line: {line}"))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn parse(args: &[String]) -> Result<(String, RunConfig), String> {
        let mut cfg = RunConfig::default();
        if args.is_empty() {
            return Err(usage());
        }
        let cmd = args[0].clone();
        // config file first, then flags override
        let mut i = 1;
        while i < args.len() {
            if args[i] == "--config" {
                let v = args.get(i + 1).ok_or("missing value for --config")?;
                cfg.load_file(v)?;
            }
            i += 1;
        }
        let mut i = 1;
        while i < args.len() {
            let a = &args[i];
            let Some(key) = a.strip_prefix("--") else {
                return Err(format!("unexpected argument {a}"));
            };
            if key == "config" {
                i += 2;
                continue;
            }
            let v = args.get(i + 1).ok_or_else(|| format!("missing value for --{key}"))?;
            cfg.set(key, v)?;
            i += 2;
        }
        Ok((cmd, cfg))
    }

    fn ctx(&self) -> Result<Ctx, String> {
        Ctx::twisted(&self.type_name).map_err(|e| e.to_string())
    }

    fn spectral(&self, ctx: &Ctx, text: &str) -> Result<SpectralParam, String> {
        parse_param(ctx.lattice, text).map_err(|e| e.to_string())
    }

    fn orbit(&self, ctx: &Ctx, node: usize) -> Result<usize, String> {
        if node == 0 || node > ctx.fd.finite_type.rank() {
            return Err(format!("node {node} outside the diagram"));
        }
        Ok(ctx.fd.orbit_of[node - 1])
    }
}

fn usage() -> String {
    format!(
        "usage: twistq <command> [--flag value ...]\n\
         commands: qchar fold detf repcheck qq-verify tq bae counterexamples verify-all\n\
         common flags: --type {{{}}} --trunc N --node N --param P --format json|text\n\
         --output PATH --config FILE --precision-bits N\n\
         qchar selectors: --kr NODE,K,PARAM | --mono \"Z[1,q^-1]*Z[1,q^1]\" |\n\
         --neg-prefund NODE | --pos-prefund NODE | --normalized-x NODE\n\
         verify-all: --only {{{}}}",
        SUPPORTED_TYPES.join("|"),
        SECTIONS.join("|")
    )
}

/// Parse "Z[1,q^-1]^2*Z[2,-q^3]" into orbit/parameter exponents via the
/// representative identification; any orbit member is accepted, with the
/// omega shift applied.
fn parse_bracket_mono(
    ctx: &Ctx,
    letter: char,
    text: &str,
) -> Result<Vec<(usize, SpectralParam, i64)>, String> {
    let mut out = Vec::new();
    for factor in text.split('*') {
        let f = factor.trim();
        let rest = f
            .strip_prefix(letter)
            .and_then(|r| r.strip_prefix('['))
            .ok_or_else(|| format!("expected {letter}[node,param] in {f}"))?;
        let (inner, exp) = match rest.split_once(']') {
            Some((inner, tail)) => {
                let tail = tail.trim();
                let e = if tail.is_empty() {
                    1
                } else {
                    tail.strip_prefix('^')
                        .and_then(|e| e.parse::<i64>().ok())
                        .ok_or_else(|| format!("bad exponent in {f}"))?
                };
                (inner, e)
            }
            None => return Err(format!("missing ] in {f}")),
        };
        let (node, param) = inner.split_once(',').ok_or_else(|| format!("expected node,param in {f}"))?;
        let node: usize = node.trim().parse().map_err(|_| format!("bad node in {f}"))?;
        if node == 0 || node > ctx.fd.finite_type.rank() {
            return Err(format!("node {node} outside the diagram"));
        }
        let mut p = parse_param(ctx.lattice, param.trim()).map_err(|e: WeightError| e.to_string())?;
        let orbit = ctx.fd.orbit_of[node - 1];
        for _ in 0..ctx.fd.shift_from_rep(node - 1) {
            p = p.times_omega(ctx);
        }
        out.push((orbit, p, exp));
    }
    Ok(out)
}

fn qchar_json(c: &QCharacter) -> String {
    serde_json::to_string_pretty(&c.to_json()).expect("serializable")
}

fn qchar_text(ctx: &Ctx, c: &QCharacter) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "terms: {}  total multiplicity: {}", c.terms.len(), c.total_multiplicity());
    for (w, m) in &c.terms {
        let height = crate::lweight::height_between(ctx, &c.base, w)
            .map(|h| h.to_string())
            .unwrap_or_else(|| "?".into());
        let consts: Vec<String> = w.consts.iter().map(|x| x.render()).collect();
        let mut roots = String::new();
        for (o, rm) in w.roots.iter().enumerate() {
            for (a, mu) in rm {
                let _ = write!(roots, " ({},{})^{}", o + 1, a.render(), mu);
            }
        }
        let _ = writeln!(s, "  mult {m} height {height} prefactor [{}] roots{}", consts.join(", "), roots);
    }
    s
}

fn cmd_qchar(cfg: &RunConfig) -> Result<(String, bool), String> {
    let ctx = cfg.ctx()?;
    let character: QCharacter = if let Some(kr) = cfg.rest.get("kr") {
        let parts: Vec<&str> = kr.split(',').collect();
        if parts.len() != 3 {
            return Err("expected --kr NODE,K,PARAM".into());
        }
        let node: usize = parts[0].trim().parse().map_err(|_| "bad node")?;
        let k: u32 = parts[1].trim().parse().map_err(|_| "bad k")?;
        let a = cfg.spectral(&ctx, parts[2].trim())?;
        let orbit = cfg.orbit(&ctx, node)?;
        kr_qcharacter(&ctx, orbit, k, a, cfg.trunc, DEFAULT_BUDGET).map_err(|e| e.to_string())?
    } else if let Some(text) = cfg.rest.get("mono") {
        // a dominant Z-monomial, computed through the unfolded expansion
        let factors = parse_bracket_mono(&ctx, 'Z', text)?;
        let src = Ctx::untwisted(ctx.fd.finite_type, ctx.lattice);
        let mut m0 = Mono::new();
        for (orbit, p, e) in factors {
            crate::qchar::mono_insert(&mut m0, ctx.fd.fixed_reps[orbit], p, e);
        }
        let unfolded = fm_qcharacter(&src, &m0, cfg.trunc, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        fold_char(&src, &ctx, &unfolded)
    } else if let Some(node) = cfg.rest.get("neg-prefund") {
        let node: usize = node.parse().map_err(|_| "bad node")?;
        let a = cfg.spectral(&ctx, &cfg.param)?;
        neg_prefund_qchar(&ctx, cfg.orbit(&ctx, node)?, a, cfg.trunc, DEFAULT_BUDGET)
            .map_err(|e| e.to_string())?
            .character
    } else if let Some(node) = cfg.rest.get("pos-prefund") {
        let node: usize = node.parse().map_err(|_| "bad node")?;
        let a = cfg.spectral(&ctx, &cfg.param)?;
        pos_prefund_qchar(&ctx, cfg.orbit(&ctx, node)?, a, cfg.trunc, DEFAULT_BUDGET)
            .map_err(|e| e.to_string())?
    } else if let Some(node) = cfg.rest.get("normalized-x") {
        let node: usize = node.parse().map_err(|_| "bad node")?;
        let a = cfg.spectral(&ctx, &cfg.param)?;
        normalized_x_qchar(&ctx, cfg.orbit(&ctx, node)?, a, cfg.trunc)
    } else {
        return Err("qchar needs one of --kr, --mono, --neg-prefund, --pos-prefund, --normalized-x".into());
    };
    let out = match cfg.format {
        OutputFormat::Json => qchar_json(&character),
        OutputFormat::Text => qchar_text(&ctx, &character),
    };
    Ok((out, true))
}

fn cmd_fold(cfg: &RunConfig) -> Result<(String, bool), String> {
    let ctx = cfg.ctx()?;
    let text = cfg.rest.get("mono").ok_or("fold needs --mono \"Y[i,param]*...\"")?;
    let src = Ctx::untwisted(ctx.fd.finite_type, ctx.lattice);
    let mut m0 = Mono::new();
    for factor in text.split('*') {
        let f = factor.trim();
        let rest = f
            .strip_prefix('Y')
            .and_then(|r| r.strip_prefix('['))
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| format!("expected Y[node,param] in {f}"))?;
        let (node, param) = rest.split_once(',').ok_or("expected node,param")?;
        let node: usize = node.trim().parse().map_err(|_| "bad node")?;
        let p = parse_param(src.lattice, param.trim()).map_err(|e| e.to_string())?;
        crate::qchar::mono_insert(&mut m0, node - 1, p, 1);
    }
    let folded = crate::identities::fold_mono(&ctx, &m0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "folded monomial: {}",
        folded
            .iter()
            .map(|((o, p), e)| format!("Z[{},{}]^{}", o + 1, p.render(), e))
            .collect::<Vec<_>>()
            .join("*")
    );
    if cfg.rest.contains_key("expand") {
        let unfolded = fm_qcharacter(&src, &m0, cfg.trunc, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let c = fold_char(&src, &ctx, &unfolded);
        match cfg.format {
            OutputFormat::Json => s.push_str(&qchar_json(&c)),
            OutputFormat::Text => s.push_str(&qchar_text(&ctx, &c)),
        }
    }
    Ok((s, true))
}

fn cmd_detf(cfg: &RunConfig) -> Result<(String, bool), String> {
    let ctx = cfg.ctx()?;
    let k: i64 = cfg
        .rest
        .get("k")
        .ok_or("detf needs --k N")?
        .parse()
        .map_err(|_| "bad k")?;
    let f = f_matrix(&ctx, k).map_err(|e| e.to_string())?;
    let mut s = String::new();
    let _ = writeln!(s, "F({k}) over the orbits of {}:", ctx.tc.name);
    for row in &f.entries {
        let cells: Vec<String> = row.iter().map(|x| x.render()).collect();
        let _ = writeln!(s, "  [{}]", cells.join(" , "));
    }
    let m = ctx.fd.m_order as i64;
    let mut ok = true;
    if k % m == 0 {
        let det = det_f(&ctx, k).map_err(|e| e.to_string())?;
        let _ = writeln!(s, "det F({k}) = {}", det.render());
        if let Some(cf) = det_closed_form(&ctx, k / m).map_err(|e| e.to_string())? {
            ok = det == cf;
            let _ = writeln!(s, "closed form match: {ok}");
        }
    } else {
        let det = det_f_prime(&ctx, k).map_err(|e| e.to_string())?;
        let _ = writeln!(s, "det F'({k}) = {}", det.render());
        if let Some(cf) = det_prime_closed_form(&ctx, k).map_err(|e| e.to_string())? {
            ok = det == cf;
            let _ = writeln!(s, "closed form match: {ok}");
        }
    }
    Ok((s, ok))
}

fn bundle_output(cfg: &RunConfig, bundle: &ReportBundle) -> (String, bool) {
    let ok = bundle.all_ok();
    let out = match cfg.format {
        OutputFormat::Json => serde_json::to_string_pretty(bundle).expect("serializable"),
        OutputFormat::Text => bundle.render_lines(),
    };
    (out, ok)
}

fn cmd_repcheck(cfg: &RunConfig) -> Result<(String, bool), String> {
    let name = cfg.rest.get("module").map(|s| s.as_str()).unwrap_or("neg_prefund_A2t");
    let bound = cfg
        .rest
        .get("bound")
        .map(|s| s.parse().unwrap_or(10))
        .unwrap_or(cfg.trunc.max(6) as i64);
    let module = load_builtin(name, bound).map_err(|e| e.to_string())?;
    let mut bundle = ReportBundle::default();
    bundle.extend(verify_presentation(&module));
    Ok(bundle_output(cfg, &bundle))
}

fn cmd_qq_verify(cfg: &RunConfig) -> Result<(String, bool), String> {
    let ctx = cfg.ctx()?;
    let a = cfg.spectral(&ctx, &cfg.param)?;
    let mut bundle = ReportBundle::default();
    let orbit = cfg.orbit(&ctx, cfg.node)?;
    bundle.push(verify_qq(&ctx, orbit, a, cfg.trunc));
    Ok(bundle_output(cfg, &bundle))
}

fn cmd_tq(cfg: &RunConfig) -> Result<(String, bool), String> {
    let ctx = cfg.ctx()?;
    let a = cfg.spectral(&ctx, &cfg.param)?;
    let orbit = cfg.orbit(&ctx, cfg.node)?;
    let (identity, reports) = tq_relation(&ctx, orbit, a, cfg.trunc).map_err(|e| e.to_string())?;
    let mut bundle = ReportBundle::default();
    bundle.extend(reports);
    let (body, ok) = bundle_output(cfg, &bundle);
    Ok((format!("{}\n{}", identity.render(), body), ok))
}

fn cmd_bae(cfg: &RunConfig) -> Result<(String, bool), String> {
    let ctx = cfg.ctx()?;
    let orbit = cfg.orbit(&ctx, cfg.node)?;
    let sys = bethe_equations(&ctx, orbit);
    let seed = cfg.rest.get("seed").and_then(|s| s.parse().ok()).unwrap_or(42u64);
    let mut bundle = ReportBundle::default();
    match numeric_consistency(&ctx, orbit, seed) {
        Ok(r) => bundle.push(r),
        Err(e) => return Err(e.to_string()),
    }
    bundle.push(degenerate_constant_q_fails(&ctx, orbit));
    let (body, ok) = bundle_output(cfg, &bundle);
    Ok((format!("{}\n{}", sys.render(), body), ok))
}

fn cmd_counterexamples(cfg: &RunConfig) -> Result<(String, bool), String> {
    let mut bundle = ReportBundle::default();
    bundle.extend(verify_counterexamples(cfg.trunc.max(4)).map_err(|e| e.to_string())?);
    Ok(bundle_output(cfg, &bundle))
}

fn cmd_verify_all(cfg: &RunConfig) -> Result<(String, bool), String> {
    let only = cfg.rest.get("only").map(|s| s.as_str());
    if let Some(o) = only {
        if !SECTIONS.contains(&o) {
            return Err(format!("unknown section {o}; available: {}", SECTIONS.join(", ")));
        }
    }
    let bundle = run_suite(only);
    Ok(bundle_output(cfg, &bundle))
}

/// Entry point shared by the binary and tests; returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    let (cmd, cfg) = match RunConfig::parse(args) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let result = match cmd.as_str() {
        "qchar" => cmd_qchar(&cfg),
        "fold" => cmd_fold(&cfg),
        "detf" => cmd_detf(&cfg),
        "repcheck" => cmd_repcheck(&cfg),
        "qq-verify" => cmd_qq_verify(&cfg),
        "tq" => cmd_tq(&cfg),
        "bae" => cmd_bae(&cfg),
        "counterexamples" => cmd_counterexamples(&cfg),
        "verify-all" => cmd_verify_all(&cfg),
        "help" | "--help" | "-h" => {
            println!("{}", usage());
            return 0;
        }
        other => Err(format!("unknown command {other}\n{}", usage())),
    };
    match result {
        Ok((text, ok)) => {
            if let Some(path) = &cfg.output {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("writing {path}: {e}");
                    return 2;
                }
            } else {
                println!("{text}");
            }
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("{e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn qchar_kr_deterministic() {
        let (cmd, cfg) =
            RunConfig::parse(&args(&["qchar", "--type", "A2^2", "--kr", "1,1,q^0", "--trunc", "2"]))
                .unwrap();
        assert_eq!(cmd, "qchar");
        let (out1, ok1) = cmd_qchar(&cfg).unwrap();
        let (out2, ok2) = cmd_qchar(&cfg).unwrap();
        assert!(ok1 && ok2);
        assert_eq!(out1, out2);
        let parsed: serde_json::Value = serde_json::from_str(&out1).unwrap();
        assert_eq!(parsed["terms"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn qchar_trunc_zero_single_term() {
        let (_, cfg) =
            RunConfig::parse(&args(&["qchar", "--type", "A2^2", "--kr", "1,2,q^0", "--trunc", "0"]))
                .unwrap();
        let (out, _) = cmd_qchar(&cfg).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(parsed["terms"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn neg_prefund_window_command() {
        let (_, cfg) =
            RunConfig::parse(&args(&["qchar", "--type", "A2^2", "--neg-prefund", "1", "--trunc", "2"]))
                .unwrap();
        let (out, ok) = cmd_qchar(&cfg).unwrap();
        assert!(ok);
        let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
        // heights 0,1,2 of the double-chain sum carry 1 + 1 + 2 terms
        assert_eq!(parsed["terms"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn fold_command_example() {
        let (_, cfg) = RunConfig::parse(&args(&[
            "fold",
            "--type",
            "A2^2",
            "--mono",
            "Y[1,q^0]*Y[2,-q^2]",
        ]))
        .unwrap();
        let (out, ok) = cmd_fold(&cfg).unwrap();
        assert!(ok);
        assert!(out.contains("Z[1,q^0]^1"), "{out}");
        assert!(out.contains("Z[1,q^2]^1"), "{out}");
    }

    #[test]
    fn detf_command() {
        let (_, cfg) = RunConfig::parse(&args(&["detf", "--type", "A3^2", "--k", "2"])).unwrap();
        let (out, ok) = cmd_detf(&cfg).unwrap();
        assert!(ok, "{out}");
        assert!(out.contains("closed form match: true"));
        let (_, cfg) = RunConfig::parse(&args(&["detf", "--type", "D4^3", "--k", "0"])).unwrap();
        assert!(cmd_detf(&cfg).is_err());
    }

    #[test]
    fn qq_and_config_file() {
        let dir = std::env::temp_dir().join("twistq-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "type=A3^2\ntrunc=2\nnode=2\nparam=q^0\nformat=text\n").unwrap();
        let (_, cfg) =
            RunConfig::parse(&args(&["qq-verify", "--config", path.to_str().unwrap()])).unwrap();
        assert_eq!(cfg.type_name, "A3^2");
        assert_eq!(cfg.node, 2);
        let (out, ok) = cmd_qq_verify(&cfg).unwrap();
        assert!(ok, "{out}");
        assert!(out.contains("PASS"));
    }

    #[test]
    fn unknown_section_rejected() {
        let (_, cfg) = RunConfig::parse(&args(&["verify-all", "--only", "nonsense"])).unwrap();
        assert!(cmd_verify_all(&cfg).is_err());
    }
}
