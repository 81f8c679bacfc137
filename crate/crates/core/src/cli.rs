//! The `domain-oracle` command line: argument parsing, the four commands and
//! their JSON output. Every command is a pure function of its arguments, so
//! identical invocations print identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::charvar::{
    cone_dimension_estimates, decompose_with, first_cone_contains, irredundancy_check, join_singularity_probe,
    level_h_member, max_translation_subspace, BlockFlag, ConeOptions, Filtration,
};
use crate::classify::{eta, parse_pairs_json, recover_cover, verify_injectivity, DomainType, ProductDomain};
use crate::curvature::{
    derive_seed, schur_structure, sigma_from_jts, trace_coupling, OffDiagonal, ProductSpec, ProductSystem,
    SigmaConvention,
};
use crate::jts::{Family, JordanTripleSystem};
use crate::par::Execution;
use crate::sampling::{complex_gaussian_matrix, complex_gaussian_vector, rng_for};
use crate::tensor_space::{block_of, flatten, group_average_with};
use crate::{CMatrix, CVector, Error, Result, C64, DEFAULT_SEED, DEFAULT_TOL_JAC, DEFAULT_TOL_RANK};

#[derive(Debug, Parser)]
#[command(
    name = "domain-oracle",
    version,
    about = "Characteristic cones of bounded symmetric domains and cover recovery"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by all commands.
#[derive(Debug, Clone, Args)]
pub struct Config {
    /// Relative singular-value threshold for kernels and cone membership
    #[arg(long, global = true, default_value_t = DEFAULT_TOL_RANK)]
    pub tol_rank: f64,
    /// Relative threshold for Jacobian and span ranks
    #[arg(long, global = true, default_value_t = DEFAULT_TOL_JAC)]
    pub tol_jac: f64,
    /// Seed for all sampling
    #[arg(long, global = true, env = "DOMAIN_ORACLE_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Base sample count (group averaging uses ten times this many elements)
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
    /// How triple systems become operators: D-type, form-type or projector
    #[arg(long, global = true, default_value = "D-type", value_parser = parse_convention)]
    pub convention: SigmaConvention,
    /// Off-diagonal scalars of product tensors: zero or identity
    #[arg(long, global = true, default_value = "zero", value_parser = parse_offdiag)]
    pub offdiag: OffDiagonal,
    /// Largest domain dimension for table and injectivity
    #[arg(long, global = true, default_value_t = 30)]
    pub max_dim: usize,
    /// Print JSON (default)
    #[arg(long, global = true, conflicts_with = "human")]
    pub json: bool,
    /// Print an indented plain-text rendering instead of JSON
    #[arg(long, global = true)]
    pub human: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tol_rank: DEFAULT_TOL_RANK,
            tol_jac: DEFAULT_TOL_JAC,
            seed: DEFAULT_SEED,
            samples: 200,
            convention: SigmaConvention::DType,
            offdiag: OffDiagonal::Zero,
            max_dim: 30,
            json: false,
            human: false,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_rank > 0.0 && self.tol_jac > 0.0) {
            return Err(Error::SpecError("tolerances must be positive".into()));
        }
        if self.samples == 0 {
            return Err(Error::SpecError("--samples must be positive".into()));
        }
        Ok(())
    }

    fn cone_options(&self) -> ConeOptions {
        ConeOptions {
            tol_rank: self.tol_rank,
            tol_jac: self.tol_jac,
            seed: self.seed,
            ..ConeOptions::default()
        }
    }
}

fn parse_convention(s: &str) -> std::result::Result<SigmaConvention, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_offdiag(s: &str) -> std::result::Result<OffDiagonal, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every domain type up to a dimension with its (dim, dim S¹) pair
    Table {
        /// Overrides --max-dim
        #[arg(value_name = "MAX_DIM")]
        limit: Option<usize>,
    },
    /// Build the product tensor for a spec such as "I(2,3)xIV(5)xD", decompose
    /// its first cone and recover the factors from the measured dimensions
    Analyze {
        spec: String,
        /// Off-diagonal scalars as a JSON k×k matrix of reals (overrides --offdiag)
        #[arg(long)]
        offdiag_matrix: Option<String>,
    },
    /// Recover a product from a JSON list of [cone dim, block dim] pairs
    Classify { pairs: String },
    /// Run a check suite: schur, join, decomposition, table, injectivity or filtration
    Verify { suite: Suite },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Schur,
    Join,
    Decomposition,
    Table,
    Injectivity,
    Filtration,
}

/// Result of a command: its JSON document and whether every asserted check
/// held.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: Value,
    pub ok: bool,
}

impl Outcome {
    fn new(output: Value, ok: bool) -> Self {
        Self { output, ok }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let config = &cli.config;
    config.validate()?;
    match &cli.command {
        Command::Table { limit } => Ok(Outcome::new(cmd_table(limit.unwrap_or(config.max_dim)), true)),
        Command::Analyze { spec, offdiag_matrix } => {
            let spec = match offdiag_matrix {
                Some(m) => ProductSpec::new(crate::curvature::parse_factors(spec)?, parse_matrix(m)?)?,
                None => ProductSpec::parse(spec, config.offdiag)?,
            };
            let output = cmd_analyze(&spec, config)?;
            let ok = output["match"] == Value::Bool(true);
            Ok(Outcome::new(output, ok))
        }
        Command::Classify { pairs } => Ok(Outcome::new(cmd_classify(pairs)?, true)),
        Command::Verify { suite } => cmd_verify(*suite, config),
    }
}

/// Renders the outcome the way the binary prints it.
pub fn render(outcome: &Outcome, human: bool) -> String {
    if human {
        let mut out = String::new();
        render_human(&outcome.output, 0, &mut out);
        out
    } else {
        let mut s = serde_json::to_string(&outcome.output).expect("values serialize");
        s.push('\n');
        s
    }
}

fn render_human(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                if val.is_object()
                    || (val.is_array() && val.as_array().is_some_and(|a| a.iter().any(|x| x.is_object())))
                {
                    let _ = writeln!(out, "{pad}{k}:");
                    render_human(val, indent + 1, out);
                } else {
                    let _ = writeln!(out, "{pad}{k}: {val}");
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                let _ = writeln!(out, "{pad}- [{i}]");
                render_human(item, indent + 1, out);
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{other}");
        }
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            print!("{}", render(&outcome, cli.config.human));
            if outcome.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            println!("{}", json!({ "error": e.to_string() }));
            eprintln!("error: {e}");
            2
        }
    }
}

fn parse_matrix(s: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(s)?;
    let k = rows.len();
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::SpecError("off-diagonal matrix must be square".into()));
    }
    Ok(CMatrix::from_fn(k, k, |i, j| C64::new(rows[i][j], 0.0)))
}

/// Canonical types up to `max_dim` with their pairs; isomorphic duplicates
/// are listed as aliases.
pub fn cmd_table(max_dim: usize) -> Value {
    let mut rows: BTreeMap<DomainType, Vec<String>> = BTreeMap::new();
    for t in DomainType::all_up_to(max_dim) {
        let c = t.canonicalize();
        let aliases = rows.entry(c).or_default();
        if c != t {
            aliases.push(t.to_string());
        }
    }
    let mut entries: Vec<(usize, usize, DomainType, Vec<String>)> = rows
        .into_iter()
        .map(|(t, a)| {
            let p = eta(t).expect("non-disc types have η");
            (p.dim_domain, p.dim_s1, t, a)
        })
        .collect();
    entries.sort();
    let entries: Vec<Value> = entries
        .into_iter()
        .map(|(dim, s1, t, aliases)| json!({ "type": t.to_string(), "dim": dim, "s1": s1, "aliases": aliases }))
        .collect();
    json!({ "max_dim": max_dim, "entries": entries })
}

pub fn cmd_classify(pairs: &str) -> Result<Value> {
    let pairs = parse_pairs_json(pairs)?;
    let domain = recover_cover(&pairs)?;
    Ok(json!({
        "pairs": pairs,
        "domain": domain.to_string(),
        "factors": domain.factors().iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    }))
}

/// The full pipeline on one product spec.
pub fn cmd_analyze(spec: &ProductSpec, config: &Config) -> Result<Value> {
    let system = ProductSystem::new(spec.clone())?;
    let sigma = system.sigma(config.convention)?;
    let space = system.space();
    let k = space.num_blocks();
    let report = schur_structure(sigma.op(), space, config.tol_rank * sigma.op().norm())?;
    let scalars: Vec<Vec<[f64; 2]>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| match (i != j).then(|| report.scalar_of(i, j)).flatten() {
                    Some(c) => [c.re, c.im],
                    None => [0.0, 0.0],
                })
                .collect()
        })
        .collect();
    let opts = config.cone_options();
    let components = decompose_with(&system, &sigma, &opts)?;

    let mut pairs = Vec::with_capacity(k);
    let mut rows = Vec::with_capacity(k);
    for c in &components {
        let member = |x: &CVector| first_cone_contains(&sigma, x, config.tol_rank);
        let v = max_translation_subspace(
            c,
            member,
            100,
            20,
            derive_seed(config.seed, c.component_index as u64),
            opts.exec,
        )?;
        let pair = (c.affine_dim - v.dim, c.block_dims[c.component_index]);
        pairs.push(pair);
        let mut row = serde_json::to_value(c.summary())?;
        row["translation_dim"] = json!(v.dim);
        row["pair"] = json!([pair.0, pair.1]);
        rows.push(row);
    }
    let expected: Option<ProductDomain> = spec
        .factors()
        .iter()
        .map(|&f| DomainType::try_from(f))
        .collect::<Result<Vec<_>>>()
        .ok()
        .map(ProductDomain::new);
    let (recovered, recovery_error) = match recover_cover(&pairs) {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let matches = recovered.is_some() && recovered == expected;
    let noball = (0..k).all(|i| (0..k).all(|j| i == j || spec.offdiag(i, j).norm() == 0.0));
    Ok(json!({
        "spec": spec.to_string(),
        "convention": config.convention.to_string(),
        "dim": space.total_dim(),
        "block_dims": space.block_dims(),
        "structure": {
            "schur": report.is_schur(),
            "max_cross_norm": report.max_cross_norm(),
            "max_scalar_deviation": report.max_scalar_deviation(),
            "offdiag_scalars": scalars,
        },
        "components": rows,
        "irredundant": noball.then(|| irredundancy_check(&components)),
        "pairs": pairs,
        "expected": expected.map(|d| d.to_string()),
        "recovered": recovered.map(|d| d.to_string()),
        "recovery_error": recovery_error,
        "match": matches,
    }))
}

pub fn cmd_verify(suite: Suite, config: &Config) -> Result<Outcome> {
    match suite {
        Suite::Table => verify_table(config),
        Suite::Injectivity => Ok(verify_injectivity_suite(config.max_dim)),
        Suite::Schur => verify_schur(config),
        Suite::Join => verify_join(config),
        Suite::Decomposition => verify_decomposition(config),
        Suite::Filtration => verify_filtration(config),
    }
}

/// Families whose cone dimensions are checked against the table.
pub fn table_families() -> Vec<Family> {
    let mut out = Vec::new();
    for p in 2..=4 {
        for q in p..=4 {
            out.push(Family::I(p, q));
        }
    }
    out.extend([4, 5, 6].map(Family::II));
    out.extend([2, 3, 4].map(Family::III));
    out.extend((3..=8).map(Family::IV));
    out.extend([Family::V, Family::VI]);
    out
}

fn verify_table(config: &Config) -> Result<Outcome> {
    let rows = crate::par::map_indexed(Execution::default(), table_families().len(), |i| -> Result<Value> {
        let f = table_families()[i];
        let j = JordanTripleSystem::new(f)?;
        let expected = eta(DomainType::try_from(f)?)?.dim_s1 + 1;
        let d = cone_dimension_estimates(&j, config.tol_jac)?;
        let pass = d.orbit_span == expected && d.minor_jacobian == expected;
        Ok(json!({
            "type": f.to_string(),
            "expected": expected,
            "orbit_span": d.orbit_span,
            "minor_jacobian": d.minor_jacobian,
            "pass": pass,
        }))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let ok = rows.iter().all(|r| r["pass"] == Value::Bool(true));
    Ok(Outcome::new(json!({ "suite": "table", "rows": rows, "pass": ok }), ok))
}

/// The coincidences explained by `IV(3) ≅ III(2)`, `IV(4) ≅ I(2,2)`,
/// `IV(6) ≅ II(4)` that fit below `max_dim`.
fn isomorphism_pairs(max_dim: usize) -> Vec<Vec<DomainType>> {
    let mut out: Vec<Vec<DomainType>> = [
        vec![DomainType::III(2), DomainType::IV(3)],
        vec![DomainType::I(2, 2), DomainType::IV(4)],
        vec![DomainType::II(4), DomainType::IV(6)],
    ]
    .into_iter()
    .filter(|g| g[1].dim() <= max_dim)
    .collect();
    out.sort();
    out
}

fn verify_injectivity_suite(max_dim: usize) -> Outcome {
    let names = |gs: &[Vec<DomainType>]| -> Vec<Vec<String>> {
        gs.iter().map(|g| g.iter().map(|t| t.to_string()).collect()).collect()
    };
    let collisions = verify_injectivity(max_dim, true);
    let mut raw = verify_injectivity(max_dim, false);
    raw.sort();
    let expected_raw = isomorphism_pairs(max_dim);
    let ok = collisions.is_empty() && raw == expected_raw;
    Outcome::new(
        json!({
            "suite": "injectivity",
            "max_dim": max_dim,
            "collisions": names(&collisions),
            "raw_collisions": names(&raw),
            "pass": ok,
        }),
        ok,
    )
}

/// Haar average of a random unit-norm operator on `I(2,2) × IV(3)` over
/// `10 × samples` holonomy elements, measured against the Schur pattern, plus
/// the exactly constructed tensors at `1e-10`.
fn verify_schur(config: &Config) -> Result<Outcome> {
    const AVERAGED_TOL: f64 = 1e-2;
    const EXACT_TOL: f64 = 1e-10;
    let count = 10 * config.samples;
    let spec = ProductSpec::parse("I(2,2)xIV(3)", OffDiagonal::Zero)?;
    let system = ProductSystem::new(spec)?;
    let space = system.space().clone();
    let n2 = space.total_dim().pow(2);
    let mut rng = rng_for(config.seed, u64::MAX);
    let a = complex_gaussian_matrix(&mut rng, n2, n2);
    let a = &a / C64::new(a.norm(), 0.0);
    let avg = group_average_with(&a, count, Execution::default(), |i| {
        system.holonomy_sample(derive_seed(config.seed, i as u64))
    })?;
    let report = schur_structure(&avg, &space, AVERAGED_TOL)?;
    let cross = report.max_cross_norm();
    let scalar_dev = report.max_scalar_deviation();
    let averaged_ok = cross <= AVERAGED_TOL && scalar_dev <= AVERAGED_TOL;

    let mut coupling = Vec::new();
    let mut residual_cross: f64 = 0.0;
    for b in report.blocks.iter().filter(|b| b.is_cross()) {
        let block = block_of(&avg, &space, b.source, b.target)?;
        let diag_to_diag = b.source.0 == b.source.1 && b.target.0 == b.target.1;
        let rest = if diag_to_diag {
            let d = |i: usize| space.block_dims()[i];
            let (c, rest) = trace_coupling(&block, d(b.source.0), d(b.target.0));
            coupling.push(json!({ "source": b.source, "target": b.target, "norm": b.norm, "trace_coefficient": c.norm(), "remainder": rest }));
            rest
        } else {
            b.norm
        };
        residual_cross = residual_cross.max(rest);
    }

    let mut exact = Vec::new();
    for pattern in [OffDiagonal::Zero, OffDiagonal::Identity] {
        let system = ProductSystem::new(ProductSpec::parse("I(2,2)xIV(3)", pattern)?)?;
        let sigma = system.sigma(config.convention)?;
        let r = schur_structure(sigma.op(), sigma.space(), EXACT_TOL)?;
        exact.push(json!({
            "offdiag": pattern.to_string(),
            "schur": r.is_schur(),
            "max_cross_norm": r.max_cross_norm(),
            "max_scalar_deviation": r.max_scalar_deviation(),
        }));
    }
    let exact_ok = exact.iter().all(|e| e["schur"] == Value::Bool(true));
    let ok = averaged_ok && exact_ok;
    Ok(Outcome::new(
        json!({
            "suite": "schur",
            "samples": count,
            "averaged": {
                "tol": AVERAGED_TOL,
                "max_cross_norm": cross,
                "max_scalar_deviation": scalar_dev,
                "max_cross_norm_without_trace_coupling": residual_cross,
                "trace_coupling": coupling,
                "pass": averaged_ok,
            },
            "exact": exact,
            "pass": ok,
        }),
        ok,
    ))
}

fn verify_join(config: &Config) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut ok = true;
    for f in [Family::I(2, 2), Family::IV(4)] {
        let j = JordanTripleSystem::new(f)?;
        for m in 0..=2 {
            let r = join_singularity_probe(&j, m, config.seed, config.tol_jac)?;
            let pass = r.passes() && r.rank_at_w.is_none_or(|w| w < r.rank_at_witness);
            ok &= pass;
            let mut v = serde_json::to_value(&r)?;
            v["pass"] = json!(pass);
            rows.push(v);
        }
    }
    Ok(Outcome::new(json!({ "suite": "join", "probes": rows, "pass": ok }), ok))
}

/// Rank-two factors (and the disc) used for random products.
pub fn rank_two_pool() -> Vec<Family> {
    let mut out = vec![Family::I(2, 2), Family::I(2, 3), Family::III(2)];
    out.extend((3..=8).map(Family::IV));
    out.extend([Family::II(4), Family::II(5), Family::Disc]);
    out
}

/// `count` seeded random products of one to three factors from
/// [`rank_two_pool`].
pub fn random_products(seed: u64, count: usize) -> Vec<Vec<Family>> {
    use rand::Rng;
    let pool = rank_two_pool();
    let mut rng = rng_for(seed, 0xDEC0);
    (0..count)
        .map(|_| {
            let k = rng.random_range(1..=3);
            (0..k).map(|_| pool[rng.random_range(0..pool.len())]).collect()
        })
        .collect()
}

/// Flags predicted by `CS(j) = CSⱼ ⊕ (⊕_{s_ij = 0} Tᵢ)`.
pub fn predicted_flags(factors: &[Family], pattern: OffDiagonal, j: usize) -> Vec<BlockFlag> {
    (0..factors.len())
        .map(|i| {
            if i == j {
                if factors[i] == Family::Disc {
                    BlockFlag::Zero
                } else {
                    BlockFlag::Cone
                }
            } else {
                match pattern {
                    OffDiagonal::Zero => BlockFlag::Full,
                    OffDiagonal::Identity => BlockFlag::Zero,
                }
            }
        })
        .collect()
}

fn verify_decomposition(config: &Config) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut ok = true;
    for factors in random_products(config.seed, 5) {
        for pattern in [OffDiagonal::Zero, OffDiagonal::Identity] {
            let spec = ProductSpec::with_pattern(factors.clone(), pattern)?;
            let sub = Config {
                offdiag: pattern,
                ..config.clone()
            };
            let analysis = cmd_analyze(&spec, &sub)?;
            let system = ProductSystem::new(spec.clone())?;
            let sigma = system.sigma(config.convention)?;
            let comps = decompose_with(&system, &sigma, &config.cone_options())?;
            let flags_ok = comps
                .iter()
                .all(|c| c.block_flags == predicted_flags(&factors, pattern, c.component_index));
            let pass = flags_ok && analysis["match"] == Value::Bool(true);
            ok &= pass;
            rows.push(json!({
                "spec": spec.to_string(),
                "offdiag": pattern.to_string(),
                "flags_match": flags_ok,
                "pairs": analysis["pairs"],
                "recovered": analysis["recovered"],
                "match": analysis["match"],
                "pass": pass,
            }));
        }
    }
    Ok(Outcome::new(
        json!({ "suite": "decomposition", "cases": rows, "pass": ok }),
        ok,
    ))
}

/// `I(3,3)` with the D-type tensor: a rank-two matrix certified at level one
/// by the explicit pair `(x, E₃₃)`, and nesting of the levels on sampled
/// points.
fn verify_filtration(config: &Config) -> Result<Outcome> {
    const BUDGET: usize = 400;
    let j = JordanTripleSystem::new(Family::I(3, 3))?;
    let sigma = sigma_from_jts(&j, SigmaConvention::DType)?;
    let mut m = CMatrix::zeros(3, 3);
    m[(0, 0)] = C64::new(1.0, 0.0);
    m[(0, 1)] = C64::new(2.0, 0.0);
    m[(1, 0)] = C64::new(0.0, 1.0);
    m[(1, 1)] = C64::new(-1.0, 0.0);
    let x = j.coords_from_matrix(&m)?;
    let mut e33 = CMatrix::zeros(3, 3);
    e33[(2, 2)] = C64::new(1.0, 0.0);
    let y = j.coords_from_matrix(&e33)?;
    let pair = &x * y.adjoint();
    let pair_residual = (sigma.op() * flatten(&pair)).norm();
    let products = [(&m * e33.adjoint()).norm(), (e33.adjoint() * &m).norm()];
    let certified = level_h_member(&sigma, &x, 1, BUDGET, config.seed)?;
    let pair_ok = pair_residual == 0.0 && products == [0.0, 0.0] && certified;

    let points = (config.samples / 4).max(1);
    let filtration = Filtration::new(sigma, 3, BUDGET, config.seed);
    let profiles = crate::par::map_indexed(Execution::default(), points, |s| -> Result<Vec<bool>> {
        let mut rng = rng_for(config.seed, 0xF1 << 32 | s as u64);
        let rank = 1 + s % 3;
        let a = complex_gaussian_matrix(&mut rng, 3, rank);
        let b = complex_gaussian_matrix(&mut rng, rank, 3);
        let pt = if s % 4 == 3 {
            complex_gaussian_vector(&mut rng, 9)
        } else {
            j.coords_from_matrix(&(a * b))?
        };
        filtration.profile(&pt)
    });
    let profiles = profiles.into_iter().collect::<Result<Vec<_>>>()?;
    let violations = profiles.iter().filter(|p| p.windows(2).any(|w| w[0] && !w[1])).count();
    let mut counts = [0usize; 3];
    for p in &profiles {
        for (h, &b) in p.iter().enumerate() {
            counts[h] += usize::from(b);
        }
    }
    let ok = pair_ok && violations == 0;
    Ok(Outcome::new(
        json!({
            "suite": "filtration",
            "certificate": {
                "rank_x": 2,
                "pair_residual": pair_residual,
                "xy_star": products[0],
                "y_star_x": products[1],
                "level_one_member": certified,
                "pass": pair_ok,
            },
            "nesting": { "points": points, "members_per_level": counts, "violations": violations },
            "pass": ok,
        }),
        ok,
    ))
}
