//! Scenario-driven certificate suites.
//!
//! A scenario file names generator matrices, the rank bound `k`, the length
//! cutoff (defaulting to `log(2k - 1)`), the word-ball truncation radius,
//! and a compact sample region. Suites evaluate the displacement bound, the
//! simplex rank bound on the region nerve, the stratified rank induction,
//! the component-tree observations, and the minimum internal rank over
//! sampled points, producing deterministic certificates: every verdict
//! carries its tolerance and the truncation radius it was computed under.

pub mod sampling;

use crate::foldings::{self, internal_rank, rank_lemma_run, LabeledSimplexSet};
use crate::hyperbolic::feasibility::{self, ConvexPiece, FeasConfig, Feasibility};
use crate::hyperbolic::{nearest_point_on_line, closest_pair_on_lines, distance, GeodesicPath, GeomError, Isometry, Point};
use crate::kleinian::{
    check_log_bound, enumerate_ball, maximal_cyclics, short_set, short_set_words, verify_ping_pong,
    CyclicLabel, ElementTable, GroupError, GroupSpec, LabelSet, NamedGenerator, PingPongCertificate,
};
use crate::nerve::{
    filtered_subcomplex, nerve, rank_theta_simplex, strata_components, theta_simplex, Labeling,
    NerveBuild, NerveError, NerveOptions, OracleAnswer, Strata,
};
use crate::tree::{self, action_on_components, is_tree, is_tree_by_union_find, TreeError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("scenario: {0}")]
    BadScenario(String),
    #[error("scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error(transparent)]
    Fold(#[from] foldings::FoldError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

fn default_matrix_dedup() -> f64 {
    1e-8
}
fn default_margin() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "default_matrix_dedup")]
    pub matrix_dedup: f64,
    #[serde(default = "default_margin")]
    pub feasibility_witness: f64,
    #[serde(default = "default_margin")]
    pub feasibility_empty: f64,
    #[serde(default = "default_margin")]
    pub marginal_displacement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            matrix_dedup: default_matrix_dedup(),
            feasibility_witness: default_margin(),
            feasibility_empty: default_margin(),
            marginal_displacement: default_margin(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    /// Entries `a, b, c, d` as interleaved `re, im` pairs.
    pub matrix: [f64; 8],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Region {
    /// `[x, y, t]` of the region center.
    pub center: [f64; 3],
    /// Hyperbolic radius.
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub generators: Vec<GeneratorSpec>,
    pub k: usize,
    /// Length cutoff; `log(2k - 1)` when absent.
    #[serde(default)]
    pub lambda: Option<f64>,
    pub ball_radius: usize,
    pub sample_region: Region,
    pub sample_count: usize,
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Scenario {
    pub fn log_threshold(&self) -> f64 {
        ((2 * self.k - 1) as f64).ln()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or_else(|| self.log_threshold())
    }

    pub fn region_center(&self) -> Result<Point, HarnessError> {
        Point::from_coords(
            self.sample_region.center[0],
            self.sample_region.center[1],
            self.sample_region.center[2],
        )
        .map_err(|e| HarnessError::BadScenario(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::BadScenario(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        if self.k < 3 {
            return Err(HarnessError::BadScenario("k must be at least 3".into()));
        }
        if !(self.lambda() > 0.0) {
            return Err(HarnessError::BadScenario("lambda must be positive".into()));
        }
        if self.ball_radius < 1 {
            return Err(HarnessError::BadScenario(
                "ball_radius must be at least 1".into(),
            ));
        }
        if self.generators.is_empty() {
            return Err(HarnessError::BadScenario("need generators".into()));
        }
        if !(self.sample_region.radius > 0.0) {
            return Err(HarnessError::BadScenario(
                "sample_region.radius must be positive".into(),
            ));
        }
        if self.sample_count == 0 {
            return Err(HarnessError::BadScenario(
                "sample_count must be positive".into(),
            ));
        }
        self.region_center()?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Scenario, HarnessError> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &std::path::Path) -> Result<Scenario, HarnessError> {
        Scenario::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scenario serializes");
        let mut h = Sha256::new();
        h.update(&bytes);
        let out = h.finalize();
        out.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn group_spec(&self) -> Result<GroupSpec, HarnessError> {
        let mut generators = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            generators.push(NamedGenerator {
                name: g.name.clone(),
                matrix: Isometry::from_reals(g.matrix)?,
            });
        }
        Ok(GroupSpec {
            generators,
            ball_radius: self.ball_radius,
            matrix_tolerance: self.tolerances.matrix_dedup,
        })
    }

    pub fn feas_config(&self) -> FeasConfig {
        FeasConfig {
            witness_margin: self.tolerances.feasibility_witness,
            empty_margin: self.tolerances.feasibility_empty,
            ..FeasConfig::default()
        }
    }
}

/// Builds a scenario from generator matrices with single-letter names.
pub fn scenario_from_generators(
    name: &str,
    gens: &[Isometry],
    k: usize,
    lambda: Option<f64>,
    ball_radius: usize,
    region_center: [f64; 3],
    region_radius: f64,
    sample_count: usize,
    seed: u64,
) -> Scenario {
    Scenario {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        generators: gens
            .iter()
            .enumerate()
            .map(|(i, g)| GeneratorSpec {
                name: ((b'a' + i as u8) as char).to_string(),
                matrix: g.to_reals(),
            })
            .collect(),
        k,
        lambda,
        ball_radius,
        sample_region: Region {
            center: region_center,
            radius: region_radius,
        },
        sample_count,
        seed,
        tolerances: Tolerances::default(),
    }
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    /// "check" for pass/fail verdicts, "observation" for recorded facts the
    /// truncation cannot promise either way.
    pub kind: String,
    pub pass: Option<bool>,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub tolerance: f64,
    pub truncation_radius: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn check(
        name: &str,
        pass: bool,
        value: f64,
        threshold: f64,
        tolerance: f64,
        radius: usize,
    ) -> Check {
        Check {
            name: name.into(),
            kind: "check".into(),
            pass: Some(pass),
            value: Some(value),
            threshold: Some(threshold),
            tolerance,
            truncation_radius: radius,
            note: None,
        }
    }

    fn observation(name: &str, value: f64, tolerance: f64, radius: usize, note: &str) -> Check {
        Check {
            name: name.into(),
            kind: "observation".into(),
            pass: None,
            value: Some(value),
            threshold: None,
            tolerance,
            truncation_radius: radius,
            note: if note.is_empty() {
                None
            } else {
                Some(note.into())
            },
        }
    }

}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WitnessRecord {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub words: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ScenarioEcho {
    pub name: String,
    pub digest: String,
    pub k: usize,
    pub lambda: f64,
    pub log_threshold: f64,
    pub ball_radius: usize,
    pub seed: u64,
    pub sample_count: usize,
    pub region_center: [f64; 3],
    pub region_radius: f64,
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TruncationEcho {
    pub ball_radius: usize,
    pub n_elements: usize,
    pub n_labels: usize,
    /// Reduced words that collided with earlier entries; nonzero means the
    /// input is not free and exact ranks degrade to upper bounds.
    pub relations: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Certificate {
    pub schema_version: u32,
    pub suite: String,
    pub scenario: ScenarioEcho,
    pub truncation: TruncationEcho,
    pub checks: Vec<Check>,
    pub witnesses: Vec<WitnessRecord>,
    pub marginal_flags: Vec<String>,
    pub certified: bool,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.pass.unwrap_or(true))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "SUITE {} scenario={} digest={} k={} lambda={:.6} log(2k-1)={:.6} ball={} seed={}\n",
            self.suite,
            self.scenario.name,
            self.scenario.digest,
            self.scenario.k,
            self.scenario.lambda,
            self.scenario.log_threshold,
            self.scenario.ball_radius,
            self.scenario.seed,
        );
        for c in &self.checks {
            let status = match c.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "OBS ",
            };
            out.push_str(&format!(
                "{status} {:<36} value={} threshold={} tol={:.1e} trunc={}{}\n",
                c.name,
                c.value.map_or("-".into(), |v| format!("{v:.9}")),
                c.threshold.map_or("-".into(), |v| format!("{v:.9}")),
                c.tolerance,
                c.truncation_radius,
                c.note
                    .as_ref()
                    .map_or(String::new(), |n| format!(" ({n})")),
            ));
        }
        for w in &self.witnesses {
            out.push_str(&format!(
                "WITNESS {} point={} words=[{}]{}\n",
                w.name,
                w.point
                    .map_or("-".into(), |p| format!("({:.6},{:.6},{:.6})", p[0], p[1], p[2])),
                w.words.join(" "),
                w.detail
                    .as_ref()
                    .map_or(String::new(), |d| format!(" {d}")),
            ));
        }
        for m in &self.marginal_flags {
            out.push_str(&format!("MARGINAL {m}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("NOTE {n}\n"));
        }
        out.push_str(&format!(
            "CERTIFIED {}\n",
            if self.certified { "yes" } else { "no" }
        ));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("suite,check,kind,pass,value,threshold,tolerance,truncation_radius\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},{},{:e},{}\n",
                self.suite,
                c.name,
                c.kind,
                c.pass.map_or("".into(), |p| p.to_string()),
                c.value.map_or("".into(), |v| format!("{v}")),
                c.threshold.map_or("".into(), |v| format!("{v}")),
                c.tolerance,
                c.truncation_radius,
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Shared context
// ---------------------------------------------------------------------------

pub struct Context {
    pub scenario: Scenario,
    pub digest: String,
    pub table: ElementTable,
    pub labels: LabelSet,
    pub ping_pong: Result<PingPongCertificate, String>,
}

pub fn prepare(scenario: &Scenario) -> Result<Context, HarnessError> {
    scenario.validate()?;
    let spec = scenario.group_spec()?;
    let gens: Vec<Isometry> = spec.generators.iter().map(|g| g.matrix).collect();
    let table = enumerate_ball(&spec)?;
    let labels = maximal_cyclics(&table, scenario.lambda())?;
    let ping_pong = verify_ping_pong(&gens, 0.0).map_err(|e| e.to_string());
    Ok(Context {
        scenario: scenario.clone(),
        digest: scenario.digest(),
        table,
        labels,
        ping_pong,
    })
}

impl Context {
    pub fn generator_matrices(&self) -> Vec<Isometry> {
        self.scenario
            .generators
            .iter()
            .map(|g| Isometry::from_reals(g.matrix).expect("validated"))
            .collect()
    }

    fn echo(&self, _suite: &str) -> ScenarioEcho {
        ScenarioEcho {
            name: self.scenario.name.clone(),
            digest: self.digest.clone(),
            k: self.scenario.k,
            lambda: self.scenario.lambda(),
            log_threshold: self.scenario.log_threshold(),
            ball_radius: self.scenario.ball_radius,
            seed: self.scenario.seed,
            sample_count: self.scenario.sample_count,
            region_center: self.scenario.sample_region.center,
            region_radius: self.scenario.sample_region.radius,
            generators: self
                .scenario
                .generators
                .iter()
                .map(|g| g.name.clone())
                .collect(),
        }
    }

    fn truncation(&self) -> TruncationEcho {
        TruncationEcho {
            ball_radius: self.scenario.ball_radius,
            n_elements: self.table.len(),
            n_labels: self.labels.len(),
            relations: self.table.relations,
        }
    }

    fn certificate(&self, suite: &str) -> Certificate {
        Certificate {
            schema_version: SCHEMA_VERSION,
            suite: suite.into(),
            scenario: self.echo(suite),
            truncation: self.truncation(),
            checks: Vec::new(),
            witnesses: Vec::new(),
            marginal_flags: Vec::new(),
            certified: true,
            notes: Vec::new(),
        }
    }

    pub fn sample_points(&self) -> Result<Vec<Point>, HarnessError> {
        let center = self.scenario.region_center()?;
        Ok((0..self.scenario.sample_count as u64)
            .map(|i| {
                sampling::sample_point(
                    &center,
                    self.scenario.sample_region.radius,
                    self.scenario.seed,
                    i,
                )
            })
            .collect())
    }

    /// Displacement piece of a label: the ball element realizing the
    /// effective tube radius at the scenario's lambda.
    fn label_piece(&self, label: &CyclicLabel) -> Result<ConvexPiece, HarnessError> {
        let lambda = self.scenario.lambda();
        let rep = label
            .realizing_power(lambda)
            .unwrap_or(&label.powers[0])
            .0
            .clone();
        let e = self
            .table
            .lookup(&rep)
            .expect("representative word is a table entry");
        Ok(ConvexPiece::displacement(&e.matrix, lambda)?)
    }

    /// Feasibility of one label family inside the sample region, exactly as
    /// the nerve oracle sees it; exposed so the nerve's defining property
    /// can be re-checked after the fact.
    pub fn region_family_feasibility(
        &self,
        family: &[usize],
    ) -> Result<Feasibility, HarnessError> {
        let center = self.scenario.region_center()?;
        let radius = self.scenario.sample_region.radius;
        let cfg = self.scenario.feas_config();
        let mut fam: Vec<ConvexPiece> = family
            .iter()
            .map(|&i| self.label_piece(&self.labels.labels[i]))
            .collect::<Result<_, _>>()?;
        fam.push(ConvexPiece::ball(center, radius));
        Ok(feasibility::decide(&fam, &[], &cfg))
    }

    /// Region-restricted nerve of the cylinder family: vertex `i` is label
    /// `i`; a family is a simplex when the defining displacements and the
    /// region ball admit a common point.
    pub fn build_region_nerve(
        &self,
        exclude_undecided: bool,
    ) -> Result<(NerveBuild, Labeling), HarnessError> {
        let center = self.scenario.region_center()?;
        let radius = self.scenario.sample_region.radius;
        let cfg = self.scenario.feas_config();
        let pieces: Vec<ConvexPiece> = self
            .labels
            .labels
            .iter()
            .map(|l| self.label_piece(l))
            .collect::<Result<_, _>>()?;
        let region = ConvexPiece::ball(center, radius);
        let mut oracle = |family: &[usize]| -> OracleAnswer {
            let mut fam: Vec<ConvexPiece> =
                family.iter().map(|&i| pieces[i].clone()).collect();
            fam.push(region.clone());
            match feasibility::decide(&fam, &[], &cfg) {
                Feasibility::Feasible { .. } => OracleAnswer::Yes,
                Feasibility::Empty { .. } => OracleAnswer::No,
                Feasibility::Undecided { .. } => OracleAnswer::Undecided,
            }
        };
        let opts = NerveOptions {
            exclude_undecided,
            ..Default::default()
        };
        let build = nerve(self.labels.len(), &mut oracle, &opts)?;
        let labeling = Labeling(
            self.labels
                .labels
                .iter()
                .map(|l| (l.id as u32, l.primitive.clone()))
                .collect(),
        );
        Ok((build, labeling))
    }
}

fn ping_pong_checks(ctx: &Context, cert: &mut Certificate) {
    match &ctx.ping_pong {
        Ok(pp) => {
            cert.checks.push(Check::check(
                "ping-pong-disk-gap",
                pp.min_gap > 0.0,
                pp.min_gap,
                0.0,
                0.0,
                ctx.scenario.ball_radius,
            ));
        }
        Err(e) => {
            cert.certified = false;
            cert.notes.push(format!(
                "ping-pong certification failed: {e}; group not certified free, rank values are upper bounds only"
            ));
        }
    }
    if ctx.table.relations > 0 {
        cert.certified = false;
        cert.notes.push(format!(
            "{} word collisions in the ball: the group is not free at this tolerance, rank values are upper bounds only",
            ctx.table.relations
        ));
    }
}

// ---------------------------------------------------------------------------
// Displacement suite
// ---------------------------------------------------------------------------

/// Evaluates the displacement bound at every sample point and records the
/// worst margins of the sum and max inequalities.
pub fn run_displacement_suite(scenario: &Scenario) -> Result<Certificate, HarnessError> {
    let ctx = prepare(scenario)?;
    let mut cert = ctx.certificate("displacement");
    ping_pong_checks(&ctx, &mut cert);
    let gens = ctx.generator_matrices();
    let k = gens.len();
    let threshold = ((2 * k - 1) as f64).ln();
    cert.notes.push(format!(
        "k={} generators; max-displacement threshold log(2k-1)={:.9}",
        k, threshold
    ));
    let points = ctx.sample_points()?;
    let mut worst_sum_margin = f64::INFINITY;
    let mut worst_max_margin = f64::INFINITY;
    let mut worst_point = points[0];
    for p in &points {
        let rep = check_log_bound(&gens, p)?;
        let sum_margin = 0.5 - rep.sum;
        let max_margin = rep.max - threshold;
        if sum_margin < worst_sum_margin {
            worst_sum_margin = sum_margin;
            worst_point = *p;
        }
        worst_max_margin = worst_max_margin.min(max_margin);
    }
    cert.checks.push(Check::check(
        "sum-bound-worst-margin",
        worst_sum_margin >= -1e-9,
        worst_sum_margin,
        0.0,
        1e-9,
        scenario.ball_radius,
    ));
    cert.checks.push(Check::check(
        "max-displacement-worst-margin",
        worst_max_margin >= -1e-9,
        worst_max_margin,
        0.0,
        1e-9,
        scenario.ball_radius,
    ));
    cert.witnesses.push(WitnessRecord {
        name: "worst-sum-point".into(),
        point: Some([worst_point.z().re, worst_point.z().im, worst_point.t()]),
        words: Vec::new(),
        detail: None,
    });
    cert.certified = cert.certified && cert.passed();
    Ok(cert)
}

// ---------------------------------------------------------------------------
// Main search
// ---------------------------------------------------------------------------

/// Minimizes the internal rank of the short-label set over sampled points
/// plus structured candidates (axis feet, pairwise closest-approach
/// midpoints, and a pattern-search thick point), reporting the best witness.
pub fn run_main_search(scenario: &Scenario) -> Result<Certificate, HarnessError> {
    let ctx = prepare(scenario)?;
    let mut cert = ctx.certificate("main-search");
    ping_pong_checks(&ctx, &mut cert);
    let k = scenario.k;
    let lambda = scenario.lambda();
    let target = k as f64 - 3.0;
    let center = scenario.region_center()?;
    let region_radius = scenario.sample_region.radius;

    let mut candidates: Vec<(String, Point)> = Vec::new();
    for l in &ctx.labels.labels {
        if let Ok(p) = nearest_point_on_line(&center, &l.lox.axis) {
            if distance(&p, &center) <= region_radius {
                candidates.push((format!("axis-foot-{}", l.primitive), p));
            }
        }
    }
    for i in 0..ctx.labels.len() {
        for j in (i + 1)..ctx.labels.len() {
            let (a, b) = (&ctx.labels.labels[i], &ctx.labels.labels[j]);
            if let Ok((f1, f2)) = closest_pair_on_lines(&a.lox.axis, &b.lox.axis) {
                let mid = GeodesicPath::midpoint(&f1, &f2);
                if distance(&mid, &center) <= region_radius {
                    candidates.push((
                        format!("axis-midpoint-{}-{}", a.primitive, b.primitive),
                        mid,
                    ));
                }
            }
        }
    }
    // thick-point improvement: push the best structured candidate away from
    // every cylinder while staying in the region. Starting from structured
    // candidates only (never samples) keeps the reported minimum monotone
    // non-increasing in the sample count.
    let thick_objective = |p: &Point| -> f64 {
        let mut m = region_radius - distance(p, &center);
        for l in &ctx.labels.labels {
            if let Some(r) = l.effective_radius(lambda) {
                if let Ok(rho) = crate::hyperbolic::dist_point_to_line(p, &l.lox.axis) {
                    m = m.min(rho - r);
                }
            }
        }
        m
    };
    {
        let best_start = candidates
            .iter()
            .map(|(_, p)| *p)
            .chain([center])
            .max_by(|a, b| {
                thick_objective(a)
                    .partial_cmp(&thick_objective(b))
                    .unwrap()
            })
            .unwrap();
        let mut best = best_start.chart();
        let mut best_v = thick_objective(&Point::from_chart(best));
        let mut h = 0.25;
        let mut budget = 3000usize;
        while h > 1e-7 && budget > 0 {
            let mut improved = false;
            for dim in 0..3 {
                for sign in [-1.0, 1.0] {
                    let mut c = best;
                    c[dim] += sign * h;
                    let v = thick_objective(&Point::from_chart(c));
                    if v > best_v + 1e-13 {
                        best_v = v;
                        best = c;
                        improved = true;
                    }
                }
            }
            budget -= 1;
            if !improved {
                h *= 0.5;
            }
        }
        candidates.push(("thick-search".into(), Point::from_chart(best)));
    }
    let samples = ctx.sample_points()?;
    for (i, p) in samples.iter().enumerate() {
        candidates.push((format!("sample-{i}"), *p));
    }

    let mut best: Option<(usize, String, Point, Vec<String>, bool)> = None;
    let mut histogram: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    for (name, p) in &candidates {
        let s = short_set(
            &ctx.labels,
            p,
            lambda,
            scenario.tolerances.marginal_displacement,
        )?;
        let words = short_set_words(&ctx.labels, &s);
        let ir = internal_rank(&words)?.rank;
        *histogram.entry(ir).or_insert(0) += 1;
        let better = match &best {
            None => true,
            Some((bir, ..)) => ir < *bir,
        };
        if better {
            best = Some((
                ir,
                name.clone(),
                *p,
                words.iter().map(|w| w.to_string()).collect(),
                s.certified,
            ));
        }
    }
    let (min_ir, name, point, words, certified) = best.expect("candidates nonempty");
    cert.checks.push(Check::check(
        "min-internal-rank",
        (min_ir as f64) <= target,
        min_ir as f64,
        target,
        0.0,
        scenario.ball_radius,
    ));
    cert.checks.push(Check::check(
        "winner-short-set-certified",
        certified,
        if certified { 1.0 } else { 0.0 },
        1.0,
        scenario.tolerances.marginal_displacement,
        scenario.ball_radius,
    ));
    if !certified {
        cert.certified = false;
        cert.marginal_flags
            .push("winning point has a marginal displacement".into());
    }
    cert.witnesses.push(WitnessRecord {
        name: format!("best-point:{name}"),
        point: Some([point.z().re, point.z().im, point.t()]),
        words,
        detail: Some(format!("IR={min_ir}")),
    });
    cert.notes.push(format!(
        "internal-rank histogram over {} candidates: {:?}",
        candidates.len(),
        histogram
    ));
    cert.notes.push(format!(
        "all set computations are within the word ball of radius {} and the sample region",
        scenario.ball_radius
    ));
    cert.certified = cert.certified && cert.passed();
    Ok(cert)
}

// ---------------------------------------------------------------------------
// Simplex rank bound suite (CLI name: lemma51)
// ---------------------------------------------------------------------------

/// Builds the region nerve and checks `rank theta(sigma) <= k - 1` on every
/// constructed simplex. Undecided families are excluded and counted; on a
/// certified-free group a rank violation falsifies the freeness or
/// discreteness of the input, and the certificate says so.
pub fn run_lemma51_suite(scenario: &Scenario) -> Result<Certificate, HarnessError> {
    let ctx = prepare(scenario)?;
    let mut cert = ctx.certificate("lemma51");
    ping_pong_checks(&ctx, &mut cert);
    let (build, labeling) = ctx.build_region_nerve(true)?;
    let bound = scenario.k - 1;
    let mut max_rank = 0usize;
    let mut violations = Vec::new();
    for s in build.complex.simplices() {
        let r = rank_theta_simplex(&labeling, s)?;
        max_rank = max_rank.max(r);
        if r > bound {
            violations.push((s.clone(), r));
        }
    }
    cert.checks.push(Check::check(
        "max-simplex-rank",
        violations.is_empty(),
        max_rank as f64,
        bound as f64,
        0.0,
        scenario.ball_radius,
    ));
    cert.checks.push(Check::check(
        "undecided-families",
        build.undecided.is_empty(),
        build.undecided.len() as f64,
        0.0,
        scenario.tolerances.feasibility_witness,
        scenario.ball_radius,
    ));
    cert.notes.push(format!(
        "nerve: {} simplices over {} labels, {} oracle queries",
        build.complex.len(),
        ctx.labels.len(),
        build.queries
    ));
    for (s, r) in &violations {
        cert.certified = false;
        let words: Vec<String> = theta_simplex(&labeling, s)?
            .iter()
            .map(|w| w.to_string())
            .collect();
        cert.notes.push(format!(
            "rank violation: simplex {s:?} has rank {r} > {bound}; on ping-pong-certified input this falsifies freeness/discreteness of the group"
        ));
        cert.witnesses.push(WitnessRecord {
            name: "rank-violation".into(),
            point: None,
            words,
            detail: Some(format!("rank={r}")),
        });
    }
    cert.certified = cert.certified && cert.passed();
    Ok(cert)
}

// ---------------------------------------------------------------------------
// Stratified rank induction suite (CLI name: rank-lemma)
// ---------------------------------------------------------------------------

/// For each face-adjacency component of each top stratum, runs the ordered
/// rank audit from two independent roots and checks every induction step
/// stays within the stratum rank.
pub fn run_rank_lemma_suite(scenario: &Scenario) -> Result<Certificate, HarnessError> {
    let ctx = prepare(scenario)?;
    let mut cert = ctx.certificate("rank-lemma");
    ping_pong_checks(&ctx, &mut cert);
    let (build, labeling) = ctx.build_region_nerve(true)?;
    let strata = strata_components(&build.complex, &labeling, scenario.k)?;
    run_rank_lemma_on_strata(&mut cert, &strata, &labeling, scenario.ball_radius)?;
    cert.certified = cert.certified && cert.passed();
    Ok(cert)
}

pub(crate) fn run_rank_lemma_on_strata(
    cert: &mut Certificate,
    strata: &Strata,
    labeling: &Labeling,
    radius: usize,
) -> Result<(), HarnessError> {
    cert.checks.push(Check::check(
        "stratum-rank-violations",
        strata.violations.is_empty(),
        strata.violations.len() as f64,
        0.0,
        0.0,
        radius,
    ));
    for (s, ir) in &strata.violations {
        cert.notes.push(format!(
            "stratum hypothesis violation: simplex {s:?} has internal rank {ir}"
        ));
    }
    let mut components = 0usize;
    let mut all_steps_ok = true;
    let mut orderings_agree = true;
    let mut worst: Option<(usize, usize, usize)> = None; // (r, size, max step rank)
    for (r, comps) in &strata.by_rank {
        for comp in comps {
            components += 1;
            let simplices: Vec<Vec<u32>> = comp.0.iter().cloned().collect();
            let set = LabeledSimplexSet {
                simplices: simplices.clone(),
                labels: labeling.0.clone(),
            };
            let t1 = rank_lemma_run(&set, *r, 0)?;
            let t2 = rank_lemma_run(&set, *r, simplices.len() - 1)?;
            if !t1.pass || !t2.pass {
                all_steps_ok = false;
                cert.notes.push(format!(
                    "induction step exceeded r={} in a component of {} simplices (fail step {:?})",
                    r,
                    simplices.len(),
                    t1.fail_step.or(t2.fail_step)
                ));
            }
            let final1 = t1.steps.last().map(|s| s.rank);
            let final2 = t2.steps.last().map(|s| s.rank);
            if final1 != final2 {
                orderings_agree = false;
            }
            let max_step = t1
                .steps
                .iter()
                .chain(t2.steps.iter())
                .map(|s| s.rank)
                .max()
                .unwrap_or(0);
            if worst.map_or(true, |(_, _, m)| max_step > m) {
                worst = Some((*r, simplices.len(), max_step));
            }
        }
    }
    cert.checks.push(Check::check(
        "induction-steps-bounded",
        all_steps_ok,
        components as f64,
        components as f64,
        0.0,
        radius,
    ));
    cert.checks.push(Check::check(
        "ordering-invariance",
        orderings_agree,
        components as f64,
        components as f64,
        0.0,
        radius,
    ));
    if let Some((r, size, m)) = worst {
        cert.notes.push(format!(
            "largest step rank {m} in a stratum-{r} component of {size} simplices"
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Tree suite
// ---------------------------------------------------------------------------

/// Builds the bipartite component graph, records the tree verdict as a
/// truncation-caveated observation, and checks naturality of the partial
/// action of each generator.
pub fn run_tree_suite(scenario: &Scenario) -> Result<Certificate, HarnessError> {
    let ctx = prepare(scenario)?;
    let mut cert = ctx.certificate("tree");
    ping_pong_checks(&ctx, &mut cert);
    let (build, labeling) = ctx.build_region_nerve(true)?;
    let strata = strata_components(&build.complex, &labeling, scenario.k)?;
    let graph = tree::build(&strata);
    cert.checks.push(Check::check(
        "bipartite-audit",
        graph.audit_bipartite(),
        graph.edges.len() as f64,
        graph.edges.len() as f64,
        0.0,
        scenario.ball_radius,
    ));
    let verdict = is_tree(&graph);
    let uf = is_tree_by_union_find(&graph);
    cert.checks.push(Check::check(
        "tree-verdicts-agree",
        (verdict == tree::TreeVerdict::Tree) == uf,
        graph.n_nodes() as f64,
        graph.n_nodes() as f64,
        0.0,
        scenario.ball_radius,
    ));
    cert.checks.push(Check::observation(
        "tree-verdict",
        graph.edges.len() as f64,
        0.0,
        scenario.ball_radius,
        &format!(
            "{} on {} nodes; truncated, region-restricted observation, not a theorem check",
            verdict.as_str(),
            graph.n_nodes()
        ),
    ));
    // label id <-> vertex id is the identity by construction of the nerve
    let vertex_of_label = |id: usize| -> Option<u32> {
        if build.complex.contains(&vec![id as u32]) {
            Some(id as u32)
        } else {
            None
        }
    };
    let label_of_vertex = |v: u32| -> Option<usize> {
        if (v as usize) < ctx.labels.len() {
            Some(v as usize)
        } else {
            None
        }
    };
    let mut coverage_total = 0.0;
    let mut mapped_any = false;
    let mut rank_ok = true;
    let mut stratum_ok = true;
    let mut edges_ok = true;
    for (gi, g) in ctx.generator_matrices().iter().enumerate() {
        let rep = action_on_components(
            &graph,
            &ctx.labels,
            &labeling,
            &vertex_of_label,
            &label_of_vertex,
            g,
        )?;
        coverage_total += rep.coverage;
        if rep.node_map.iter().any(|m| m.is_some()) {
            mapped_any = true;
        }
        rank_ok &= rep.rank_preserved;
        stratum_ok &= rep.stratum_preserved;
        edges_ok &= rep.edges_preserved;
        cert.checks.push(Check::observation(
            &format!("action-coverage-gen{gi}"),
            rep.coverage,
            0.0,
            scenario.ball_radius,
            "fraction of components transportable within the truncation",
        ));
    }
    let n_gens = ctx.scenario.generators.len().max(1);
    cert.checks.push(Check::check(
        "naturality-rank-preserved",
        rank_ok,
        if rank_ok { 1.0 } else { 0.0 },
        1.0,
        0.0,
        scenario.ball_radius,
    ));
    cert.checks.push(Check::check(
        "naturality-stratum-preserved",
        stratum_ok,
        if stratum_ok { 1.0 } else { 0.0 },
        1.0,
        0.0,
        scenario.ball_radius,
    ));
    cert.checks.push(Check::check(
        "naturality-edges-preserved",
        edges_ok,
        if edges_ok { 1.0 } else { 0.0 },
        1.0,
        0.0,
        scenario.ball_radius,
    ));
    cert.notes.push(format!(
        "mean action coverage {:.3}; identity always transports, generators may leave the ball{}",
        coverage_total / n_gens as f64,
        if mapped_any { "" } else { " (no component transported)" }
    ));
    cert.certified = cert.certified && cert.passed();
    Ok(cert)
}

// ---------------------------------------------------------------------------
// Filtration audit (exposed for tests and the `all` command)
// ---------------------------------------------------------------------------

/// Face-monotonicity and downward-closure audit of the internal-rank
/// filtration on the region nerve.
pub fn run_filtration_audit(scenario: &Scenario) -> Result<Certificate, HarnessError> {
    let ctx = prepare(scenario)?;
    let mut cert = ctx.certificate("filtration");
    let (build, labeling) = ctx.build_region_nerve(true)?;
    let cx = &build.complex;
    let mut monotone = true;
    for s in cx.simplices() {
        let ir = crate::nerve::internal_rank_of_simplex(&labeling, s)?;
        for i in 0..s.len() {
            if s.len() == 1 {
                continue;
            }
            let mut f = s.clone();
            f.remove(i);
            if crate::nerve::internal_rank_of_simplex(&labeling, &f)? > ir {
                monotone = false;
            }
        }
    }
    let max_ir = cx
        .simplices()
        .map(|s| crate::nerve::internal_rank_of_simplex(&labeling, s))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let mut nested = true;
    let mut prev = crate::nerve::Complex::empty();
    for m in 0..=max_ir {
        let f = filtered_subcomplex(cx, &labeling, m)?;
        if !prev.simplices().all(|s| f.contains(s)) {
            nested = false;
        }
        prev = f;
    }
    cert.checks.push(Check::check(
        "ir-face-monotone",
        monotone,
        cx.len() as f64,
        cx.len() as f64,
        0.0,
        scenario.ball_radius,
    ));
    cert.checks.push(Check::check(
        "filtration-nested",
        nested,
        max_ir as f64,
        max_ir as f64,
        0.0,
        scenario.ball_radius,
    ));
    if !cx.is_empty() {
        let betti = crate::nerve::homology_z2(cx)?;
        cert.checks.push(Check::observation(
            "nerve-betti-z2",
            betti[0] as f64,
            0.0,
            scenario.ball_radius,
            &format!(
                "b = {betti:?} over GF(2); contractibility PROXY only, on the region-restricted nerve"
            ),
        ));
    }
    cert.certified = cert.passed();
    Ok(cert)
}

/// Runs every suite in order.
pub fn run_all(scenario: &Scenario) -> Result<Vec<Certificate>, HarnessError> {
    Ok(vec![
        run_displacement_suite(scenario)?,
        run_main_search(scenario)?,
        run_lemma51_suite(scenario)?,
        run_rank_lemma_suite(scenario)?,
        run_tree_suite(scenario)?,
        run_filtration_audit(scenario)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kleinian::circle_pairing;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Two short loxodromics with clearing isometric disks. The twist that
    /// keeps the trace near the real axis is `2 arg(c2 - c1) - pi`, so the
    /// horizontal pair takes a twist near pi and the vertical pair a twist
    /// near zero; translation lengths then sit below log 5 and the k=3
    /// label family is nonempty.
    pub(crate) fn close_pair_scenario() -> Scenario {
        let pi = std::f64::consts::PI;
        let a = circle_pairing(c(-0.5, 0.0), c(0.5, 0.0), 0.44, pi - 0.1).unwrap();
        let b = circle_pairing(c(1.5, -0.5), c(1.5, 0.5), 0.44, 0.2).unwrap();
        Scenario {
            schema_version: SCHEMA_VERSION,
            name: "close-pair".into(),
            generators: vec![
                GeneratorSpec {
                    name: "a".into(),
                    matrix: a.to_reals(),
                },
                GeneratorSpec {
                    name: "b".into(),
                    matrix: b.to_reals(),
                },
            ],
            k: 3,
            lambda: None,
            ball_radius: 3,
            sample_region: Region {
                center: [0.6, 0.0, 0.5],
                radius: 1.4,
            },
            sample_count: 60,
            seed: 11,
            tolerances: Tolerances::default(),
        }
    }

    #[test]
    fn scenario_roundtrip_and_validation() {
        let s = close_pair_scenario();
        let text = serde_json::to_string(&s).unwrap();
        let back = Scenario::from_json(&text).unwrap();
        assert_eq!(back.digest(), s.digest());
        let mut bad = s.clone();
        bad.k = 2;
        assert!(bad.validate().is_err());
        let mut bad = s.clone();
        bad.sample_count = 0;
        assert!(bad.validate().is_err());
        let mut bad = s;
        bad.schema_version = 99;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn lambda_defaults_to_log_threshold() {
        let s = close_pair_scenario();
        assert!((s.lambda() - 5.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn close_pair_has_short_labels() {
        let ctx = prepare(&close_pair_scenario()).unwrap();
        assert!(ctx.ping_pong.is_ok(), "{:?}", ctx.ping_pong.as_ref().err());
        assert!(
            ctx.labels.len() >= 3,
            "expected generators plus conjugates, got {}",
            ctx.labels.len()
        );
        let (build, _labeling) = ctx.build_region_nerve(true).unwrap();
        assert!(build.undecided.is_empty(), "{:?}", build.undecided);
        // at the log(2k-1) cutoff, disk-Schottky cylinders stay disjoint
        // inside the region: the nerve is a set of vertices
        let n_vertices = build.complex.vertices().len();
        assert!(n_vertices >= 2, "expected both generator cylinders to meet the region");
    }

    /// The same pair probed above the default cutoff: at lambda = 3.0 the
    /// generator cylinders overlap, giving a nerve with edges and both
    /// strata populated.
    pub(crate) fn rich_nerve_scenario() -> Scenario {
        let mut s = close_pair_scenario();
        s.name = "close-pair-wide".into();
        s.lambda = Some(3.0);
        s.sample_region = Region {
            center: [0.75, 0.0, 0.35],
            radius: 1.6,
        };
        s
    }

    #[test]
    fn rich_nerve_has_edges_and_strata() {
        let s = rich_nerve_scenario();
        let ctx = prepare(&s).unwrap();
        let (build, labeling) = ctx.build_region_nerve(true).unwrap();
        assert!(build.undecided.is_empty(), "{:?}", build.undecided);
        let n_edges = build.complex.simplices().filter(|x| x.len() == 2).count();
        assert!(n_edges >= 1, "nerve:\n{}", build.complex.to_text());
        let strata = strata_components(&build.complex, &labeling, s.k).unwrap();
        let (r1, comps1) = &strata.by_rank[0];
        let (r2, comps2) = &strata.by_rank[1];
        assert_eq!((*r1, *r2), (1, 2));
        assert!(!comps1.is_empty());
        assert!(!comps2.is_empty());
    }

    #[test]
    fn certificates_are_deterministic() {
        let s = close_pair_scenario();
        let c1 = run_main_search(&s).unwrap();
        let c2 = run_main_search(&s).unwrap();
        assert_eq!(c1.to_json(), c2.to_json());
        let d1 = run_displacement_suite(&s).unwrap();
        let d2 = run_displacement_suite(&s).unwrap();
        assert_eq!(d1.to_json(), d2.to_json());
    }

    #[test]
    fn main_search_min_is_monotone_in_sample_count() {
        let mut s = close_pair_scenario();
        s.sample_count = 10;
        let c10 = run_main_search(&s).unwrap();
        s.sample_count = 40;
        let c40 = run_main_search(&s).unwrap();
        let v10 = c10.checks.iter().find(|c| c.name == "min-internal-rank").unwrap().value;
        let v40 = c40.checks.iter().find(|c| c.name == "min-internal-rank").unwrap().value;
        assert!(v40 <= v10, "more samples can only lower the minimum");
    }

    #[test]
    fn displacement_suite_passes_on_certified_pair() {
        let cert = run_displacement_suite(&close_pair_scenario()).unwrap();
        assert!(cert.passed(), "{}", cert.to_text());
        assert!(cert.certified);
    }

    #[test]
    fn lemma51_suite_bounds_ranks() {
        let cert = run_lemma51_suite(&close_pair_scenario()).unwrap();
        assert!(cert.passed(), "{}", cert.to_text());
    }

    #[test]
    fn rank_lemma_suite_runs_inductions() {
        let cert = run_rank_lemma_suite(&rich_nerve_scenario()).unwrap();
        assert!(cert.passed(), "{}", cert.to_text());
    }

    #[test]
    fn tree_suite_reports_observations() {
        let cert = run_tree_suite(&rich_nerve_scenario()).unwrap();
        assert!(cert.passed(), "{}", cert.to_text());
        assert!(cert
            .checks
            .iter()
            .any(|c| c.name == "tree-verdict" && c.kind == "observation"));
    }

    #[test]
    fn csv_and_text_render() {
        let cert = run_displacement_suite(&close_pair_scenario()).unwrap();
        let csv = cert.to_csv();
        assert!(csv.starts_with("suite,check,"));
        assert!(csv.lines().count() >= 3);
        let text = cert.to_text();
        assert!(text.contains("SUITE displacement"));
        assert!(text.contains("CERTIFIED"));
    }

    #[test]
    fn ir_along_a_path_crossing_one_cylinder() {
        // single generator, k = 3: IR goes 0 -> 1 -> 0 along a geodesic
        // through the cylinder
        let a = circle_pairing(c(-0.5, 0.0), c(0.5, 0.0), 0.44, std::f64::consts::PI).unwrap();
        let s = Scenario {
            schema_version: SCHEMA_VERSION,
            name: "single".into(),
            generators: vec![GeneratorSpec {
                name: "a".into(),
                matrix: a.to_reals(),
            }],
            k: 3,
            lambda: None,
            ball_radius: 2,
            sample_region: Region {
                center: [0.0, 0.0, 0.5],
                radius: 1.0,
            },
            sample_count: 4,
            seed: 1,
            tolerances: Tolerances::default(),
        };
        let ctx = prepare(&s).unwrap();
        assert_eq!(ctx.labels.len(), 1);
        let label = &ctx.labels.labels[0];
        let foot = nearest_point_on_line(
            &Point::from_coords(0.0, 0.0, 1.0).unwrap(),
            &label.lox.axis,
        )
        .unwrap();
        let far = Point::from_coords(0.0, 6.0, foot.t()).unwrap();
        let (path, d) = GeodesicPath::through(&far, &foot);
        let mut irs = Vec::new();
        let n = 48;
        for i in 0..=n {
            let p = path.at(2.0 * d * i as f64 / n as f64); // overshoot past the axis
            let set = short_set(&ctx.labels, &p, s.lambda(), 1e-6).unwrap();
            let words = short_set_words(&ctx.labels, &set);
            irs.push(internal_rank(&words).unwrap().rank);
        }
        assert_eq!(*irs.first().unwrap(), 0, "path starts outside");
        assert!(irs.contains(&1), "path crosses the cylinder");
        assert_eq!(*irs.last().unwrap(), 0, "path exits the cylinder: {irs:?}");
    }
}
