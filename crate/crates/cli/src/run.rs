use std::fs;
use std::path::Path;
use std::time::Instant;

use hereditary_core::boxes::{KRationalBox, Template, TemplateJson};
use hereditary_core::containers::{
    build_containers_desk_scale, forbidden_family, k_rational_inner_approx, template_container_box,
    verify_container_family, Complement, ContainerReport, DEFAULT_BADNESS_PROBES, DEFAULT_CONTAINER_BUDGET,
};
use hereditary_core::extremal::{analytic_extremal, grid_extremal, monotonicity_audit, ExtremalReport, DEFAULT_SEARCH_BUDGET};
use hereditary_core::kgraphon::{
    cut_distance, cut_distance_graphs, delta_cut, entropy_identity, growth_rate_audit, ColourPredicate, ColourProperty,
    CutMode, CutValue, KColouredGraph, MonochromaticTriangleFree, StepGraphon, StepGraphonJson,
};
use hereditary_core::properties::{Property, PropertyDescriptor};
use hereditary_core::rng::stream;
use hereditary_core::volume::{
    check_feasible, density_trend, estimate_volume, grid_bracket, stanley_wilf_estimate, StanleyWilfRow, TrendRow,
    VolumeEstimate, DEFAULT_CELL_BUDGET,
};
use hereditary_core::{Error, Family};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, ExperimentConfig};

#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Core(e)
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "{m}"),
            RunError::Core(e) => write!(f, "{e}"),
            RunError::Io(m) => write!(f, "{m}"),
        }
    }
}

type Result<T> = std::result::Result<T, RunError>;

/// Tabular and structured forms of one experiment's result.
pub struct Output {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
}

impl Output {
    fn new(header: &[&str], rows: Vec<Vec<String>>, json: Value) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
            json,
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialise")
}

fn need<T: Clone>(v: &Option<T>, flag: &str, cmd: Command) -> Result<T> {
    v.clone().ok_or_else(|| RunError::Usage(format!("{} needs --{flag}", cmd.name())))
}

fn property(cfg: &ExperimentConfig) -> Result<(PropertyDescriptor, std::sync::Arc<dyn Property>)> {
    let d = need(&cfg.property, "property", cfg.command)?;
    let p = d.build()?;
    Ok((d, p))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))
}

pub fn run(cfg: &ExperimentConfig, workers: usize) -> Result<Output> {
    match cfg.command {
        Command::SseeAudit => ssee_audit(cfg),
        Command::Extremal => extremal(cfg),
        Command::Volume => volume(cfg, workers),
        Command::Trend => trend(cfg, workers),
        Command::Graphon => graphon(cfg, workers),
        Command::Containers => containers(cfg, workers),
        Command::StanleyWilf => stanley_wilf(cfg, workers),
    }
}

fn ssee_audit(cfg: &ExperimentConfig) -> Result<Output> {
    let cmd = cfg.command;
    let family: Family = need(&cfg.family, "family", cmd)?;
    let source = need(&cfg.source, "source", cmd)?;
    let levels = match (&cfg.levels, cfg.n) {
        (Some(l), _) => l.clone(),
        (None, Some(n)) => vec![n],
        (None, None) => return Err(RunError::Usage("ssee-audit needs --levels or --n".into())),
    };
    let reports = family.goodness_audit(source, &levels)?;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for r in &reports {
        let h = family.homogeneity(source, r.target)?;
        rows.push(vec![
            family.name().to_string(),
            source.to_string(),
            r.target.to_string(),
            r.embedding_count.to_string(),
            r.coord_count.to_string(),
            r.intersect_count.to_string(),
            format!("{}/{}", r.ratio_cond2.numer(), r.ratio_cond2.denom()),
            format!("{}/{}", r.ratio_cond3.numer(), r.ratio_cond3.denom()),
            h.homogeneous.to_string(),
        ]);
        items.push(json!({
            "goodness": to_json(r),
            "homogeneous": h.homogeneous,
            "per_coord": h.per_coord.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        }));
    }
    Ok(Output::new(
        &["family", "N", "n", "embedding_count", "coord_count", "intersect_count", "ratio_cond2", "ratio_cond3", "homogeneous"],
        rows,
        Value::Array(items),
    ))
}

fn extremal(cfg: &ExperimentConfig) -> Result<Output> {
    let cmd = cfg.command;
    let (desc, prop) = property(cfg)?;
    let budget = cfg.budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
    let single = |r: ExtremalReport| Output::new(&ExtremalReport::CSV_HEADER, vec![r.csv_row()], to_json(&r));
    match cfg.mode.as_deref().unwrap_or("grid") {
        "grid" => {
            let n = need(&cfg.n, "n", cmd)?;
            let k = need(&cfg.grid_k, "grid-k", cmd)?;
            Ok(single(grid_extremal(prop.as_ref(), n, k, budget)?))
        }
        "analytic" => Ok(single(analytic_extremal(&desc, need(&cfg.n, "n", cmd)?)?)),
        "monotonicity" => {
            let levels = need(&cfg.levels, "levels", cmd)?;
            let k = need(&cfg.grid_k, "grid-k", cmd)?;
            let report = monotonicity_audit(prop.as_ref(), &levels, k, budget)?;
            let rows = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        desc.label(),
                        r.n.to_string(),
                        k.to_string(),
                        r.entropy_nats.to_string(),
                        r.x_n.to_string(),
                        report.nondecreasing.to_string(),
                    ]
                })
                .collect();
            Ok(Output::new(&["property", "n", "k", "entropy_nats", "x_n", "nondecreasing"], rows, to_json(&report)))
        }
        other => Err(RunError::Usage(format!("unknown extremal mode '{other}' (grid, analytic, monotonicity)"))),
    }
}

fn volume(cfg: &ExperimentConfig, workers: usize) -> Result<Output> {
    let cmd = cfg.command;
    let (_, prop) = property(cfg)?;
    let n = need(&cfg.n, "n", cmd)?;
    let start = Instant::now();
    let mut est = match cfg.mode.as_deref().unwrap_or("mc") {
        "mc" => {
            let samples = need(&cfg.samples, "samples", cmd)?;
            // a starved request is refused even before the seed is checked
            check_feasible(prop.as_ref(), n, samples, cfg.seed.unwrap_or(0), workers)?;
            let seed = need(&cfg.seed, "seed", cmd)?;
            estimate_volume(prop.as_ref(), n, samples, seed, workers)?
        }
        "grid-bracket" => {
            let k = need(&cfg.grid_k, "grid-k", cmd)?;
            grid_bracket(prop.as_ref(), n, k, cfg.budget.unwrap_or(DEFAULT_CELL_BUDGET))?
        }
        other => return Err(RunError::Usage(format!("unknown volume mode '{other}' (mc, grid-bracket)"))),
    };
    if cfg.timing == Some(true) {
        est.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(Output::new(&VolumeEstimate::CSV_HEADER, vec![est.csv_row()], to_json(&est)))
}

fn trend(cfg: &ExperimentConfig, workers: usize) -> Result<Output> {
    let cmd = cfg.command;
    let (_, prop) = property(cfg)?;
    let levels = need(&cfg.levels, "levels", cmd)?;
    let samples = need(&cfg.samples, "samples", cmd)?;
    let seed = need(&cfg.seed, "seed", cmd)?;
    let rows = density_trend(prop.as_ref(), &levels, samples, seed, workers)?;
    Ok(Output::new(&TrendRow::CSV_HEADER, rows.iter().map(TrendRow::csv_row).collect(), to_json(&rows)))
}

fn stanley_wilf(cfg: &ExperimentConfig, workers: usize) -> Result<Output> {
    let cmd = cfg.command;
    let pattern = match (&cfg.pattern, &cfg.property) {
        (Some(p), _) => p.clone(),
        (None, Some(PropertyDescriptor::Pattern { pi })) => pi.clone(),
        _ => return Err(RunError::Usage("stanley-wilf needs --pattern".into())),
    };
    let levels = need(&cfg.levels, "levels", cmd)?;
    let samples = need(&cfg.samples, "samples", cmd)?;
    let seed = need(&cfg.seed, "seed", cmd)?;
    let rows = stanley_wilf_estimate(&pattern, &levels, samples, seed, workers)?;
    Ok(Output::new(&StanleyWilfRow::CSV_HEADER, rows.iter().map(StanleyWilfRow::csv_row).collect(), to_json(&rows)))
}

enum Coloured {
    Graph(KColouredGraph),
    Graphon(StepGraphon),
}

fn read_coloured(path: &Path) -> Result<Coloured> {
    let v: Value = read_json(path)?;
    if v.get("colours").is_some() {
        let g: KColouredGraph = serde_json::from_value(v).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))?;
        Ok(Coloured::Graph(KColouredGraph::new(g.n, g.k, g.colours)?))
    } else {
        let j: StepGraphonJson = serde_json::from_value(v).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))?;
        Ok(Coloured::Graphon(StepGraphon::from_json(&j)?))
    }
}

fn read_graphon(path: &Path) -> Result<StepGraphon> {
    match read_coloured(path)? {
        Coloured::Graphon(w) => Ok(w),
        Coloured::Graph(g) => Ok(g.to_graphon()),
    }
}

fn cut_output(c: &CutValue) -> Output {
    let list = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
    Output::new(
        &["value", "exact", "s", "t"],
        vec![vec![c.value.to_string(), c.exact.to_string(), list(&c.s), list(&c.t)]],
        to_json(c),
    )
}

fn graphon(cfg: &ExperimentConfig, workers: usize) -> Result<Output> {
    let cmd = cfg.command;
    let op = need(&cfg.op, "op", cmd)?;
    match op.as_str() {
        "entropy" => {
            let w = read_graphon(&need(&cfg.graphon, "graphon", cmd)?)?;
            let e = w.entropy();
            Ok(Output::new(
                &["k", "m", "entropy"],
                vec![vec![w.k().to_string(), w.parts().to_string(), e.to_string()]],
                json!({"k": w.k(), "m": w.parts(), "entropy": e}),
            ))
        }
        "cut" => {
            let a = read_coloured(&need(&cfg.graphon, "graphon", cmd)?)?;
            let b = read_coloured(&need(&cfg.other, "other", cmd)?)?;
            let mode = match cfg.mode.as_deref().unwrap_or("exact") {
                "exact" => CutMode::Exact,
                "local-search" => CutMode::local_search(need(&cfg.seed, "seed", cmd)?),
                other => return Err(RunError::Usage(format!("unknown cut mode '{other}' (exact, local-search)"))),
            };
            let c = match (a, b) {
                (Coloured::Graph(g), Coloured::Graph(h)) => cut_distance_graphs(&g, &h, mode)?,
                (a, b) => {
                    let w = |x: Coloured| match x {
                        Coloured::Graph(g) => g.to_graphon(),
                        Coloured::Graphon(w) => w,
                    };
                    cut_distance(&w(a), &w(b), mode)?
                }
            };
            Ok(cut_output(&c))
        }
        "delta-cut" => {
            let u = read_graphon(&need(&cfg.graphon, "graphon", cmd)?)?;
            let w = read_graphon(&need(&cfg.other, "other", cmd)?)?;
            let d = delta_cut(&u, &w)?;
            let perm = d.permutation.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
            Ok(Output::new(&["value", "permutation"], vec![vec![d.value.to_string(), perm]], to_json(&d)))
        }
        "identity" => {
            let tj: TemplateJson = read_json(&need(&cfg.template, "template", cmd)?)?;
            let t = Template::from_json(&tj, Some(Family::CompleteGraphEdges))?;
            let id = entropy_identity(&t)?;
            Ok(Output::new(
                &["n", "k", "template_entropy", "integral", "tile_identity", "uncorrected_identity", "discrepancy", "holds"],
                vec![vec![
                    id.n.to_string(),
                    id.k.to_string(),
                    id.template_entropy.to_string(),
                    id.integral.to_string(),
                    id.tile_identity.to_string(),
                    id.uncorrected_identity.to_string(),
                    id.discrepancy.to_string(),
                    id.holds.to_string(),
                ]],
                to_json(&id),
            ))
        }
        "growth" => growth(cfg, workers),
        "sample-template" | "sample-colouring" => {
            let w = read_graphon(&need(&cfg.graphon, "graphon", cmd)?)?;
            let n = need(&cfg.n, "n", cmd)?;
            let seed = need(&cfg.seed, "seed", cmd)?;
            let mut rng = stream(seed, 0);
            let (entries, value) = if op == "sample-template" {
                let t = w.random_template(n, &mut rng)?;
                let j = t.to_json();
                (serde_json::to_string(&j.colours).expect("serialise"), to_json(&j))
            } else {
                let g = w.random_colouring(n, &mut rng)?;
                (serde_json::to_string(&g.colours).expect("serialise"), to_json(&g))
            };
            Ok(Output::new(
                &["n", "k", "seed", "entries"],
                vec![vec![n.to_string(), w.k().to_string(), seed.to_string(), entries]],
                value,
            ))
        }
        other => Err(RunError::Usage(format!(
            "unknown graphon op '{other}' (entropy, cut, delta-cut, identity, growth, sample-template, sample-colouring)"
        ))),
    }
}

fn growth(cfg: &ExperimentConfig, workers: usize) -> Result<Output> {
    let cmd = cfg.command;
    let k = need(&cfg.k, "k", cmd)?;
    let levels = need(&cfg.levels, "levels", cmd)?;
    let samples = need(&cfg.samples, "samples", cmd)?;
    let seed = need(&cfg.seed, "seed", cmd)?;
    let candidate = cfg.graphon.as_deref().map(read_graphon).transpose()?;
    let all = ColourPredicate::new("all", |_: &KColouredGraph| true);
    let tri = MonochromaticTriangleFree {
        colour: cfg.colour.unwrap_or(1),
    };
    let prop: &dyn ColourProperty = match cfg.colour_property.as_deref().unwrap_or("triangle-free") {
        "all" => &all,
        "triangle-free" => &tri,
        other => return Err(RunError::Usage(format!("unknown colour property '{other}' (all, triangle-free)"))),
    };
    let report = growth_rate_audit(prop, k, &levels, samples, seed, workers, candidate.as_ref())?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                report.property.clone(),
                k.to_string(),
                r.n.to_string(),
                r.samples.to_string(),
                seed.to_string(),
                r.hits.to_string(),
                r.normalized.to_string(),
                r.normalized_low.to_string(),
                r.normalized_high.to_string(),
                opt(r.exact_count.map(|c| c.to_string())),
                opt(r.within_3_sigma.map(|c| c.to_string())),
                opt(r.gap.map(|c| c.to_string())),
            ]
        })
        .collect();
    Ok(Output::new(
        &[
            "property",
            "k",
            "n",
            "samples",
            "seed",
            "hits",
            "normalized",
            "normalized_low",
            "normalized_high",
            "exact_count",
            "within_3_sigma",
            "gap",
        ],
        rows,
        to_json(&report),
    ))
}

fn containers(cfg: &ExperimentConfig, workers: usize) -> Result<Output> {
    let cmd = cfg.command;
    let (_, prop) = property(cfg)?;
    let source = need(&cfg.source, "source", cmd)?;
    let n = need(&cfg.n, "n", cmd)?;
    let k = need(&cfg.grid_k, "grid-k", cmd)?;
    let epsilon = need(&cfg.epsilon, "epsilon", cmd)?;
    let seed = need(&cfg.seed, "seed", cmd)?;
    let probes = cfg.probes.unwrap_or(DEFAULT_BADNESS_PROBES);
    let budget = cfg.budget.unwrap_or(DEFAULT_CONTAINER_BUDGET);
    if source > n {
        return Err(RunError::Usage("containers needs --source at most --n".into()));
    }
    let family = prop.family();
    let approx = k_rational_inner_approx(prop.as_ref(), source, k, budget)?;
    let f = forbidden_family(&approx.union, family, source, k, budget)?;
    let templates = build_containers_desk_scale(&f, n, epsilon, seed, budget)?;
    let boxes: Vec<KRationalBox> = templates.iter().map(template_container_box).collect();
    let body = Complement::new(prop.as_ref(), source);
    let report = verify_container_family(&boxes, &body, prop.as_ref(), n, epsilon, probes, seed, workers, Some(&f))?;
    let mut header: Vec<&str> = ContainerReport::CSV_HEADER.to_vec();
    header.extend(["forbidden_colourings", "boundary_measure"]);
    let mut row = report.csv_row();
    row.extend([f.len().to_string(), approx.boundary_measure().to_string()]);
    Ok(Output::new(
        &header,
        vec![row],
        json!({
            "report": to_json(&report),
            "forbidden_colourings": f.len(),
            "boundary_measure": approx.boundary_measure(),
            "templates": templates.iter().map(|t| to_json(&t.to_json())).collect::<Vec<_>>(),
        }),
    ))
}
