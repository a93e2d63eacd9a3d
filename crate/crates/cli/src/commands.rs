use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use polarforge::forms::{polar_point_count, PolarKind, SpaceSpec};
use polarforge::io::{read_json, subspace_rows, to_json, CensusBlock, PointSetFile, SpreadFile};
use polarforge::klein::{self, Census, Spread};
use polarforge::ovoids::{self, OvoidCertificate, SearchOptions};
use polarforge::pipelines::{self, PipelineOptions};
use polarforge::projgeom::enumerate_subspaces;
use polarforge::{Error, FieldCtx, PointSet, PolarSpace};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Command, SpreadMethod};

/// Result of one command: the files to write, a stdout summary in both
/// formats, and the verdict that decides the exit code.
pub struct Outcome {
    pub ok: bool,
    pub text: String,
    pub summary: Value,
    pub files: Vec<(String, String)>,
}

impl Outcome {
    fn new(ok: bool, text: String, summary: impl Serialize) -> Self {
        Outcome { ok, text, summary: serde_json::to_value(summary).expect("serializable"), files: Vec::new() }
    }

    fn with_file(mut self, name: &str, value: &impl Serialize) -> Self {
        self.files.push((name.to_string(), to_json(value)));
        self
    }
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Info { space } => info(space),
        Command::Generators { space } => generators(space),
        Command::OvoidSearch { space, m, seed, budget, include, exclude } => {
            ovoid_search(space, *m, SearchOptions { seed: *seed, budget: *budget }, include.as_deref(), exclude.as_deref())
        }
        Command::OvoidVerify { space, file } => ovoid_verify(space.as_ref(), file),
        Command::SpreadBuild { q, method, alpha } => spread_build(*q, *method, *alpha),
        Command::SpreadCensus { q, method, alpha, file } => match file {
            Some(path) => spread_census_file(path),
            None => {
                let (q, method) = (q.expect("clap enforces --q"), method.expect("clap enforces --method"));
                spread_census(q, method, *alpha)
            }
        },
        Command::KleinMap { q } => klein_map(*q),
        Command::Glue { q, seed, budget, stretch } => glue(
            *q,
            PipelineOptions { search: SearchOptions { seed: *seed, budget: *budget }, allow_stretch: *stretch },
        ),
        Command::DisjointFamily { seed, budget, m } => disjoint_family(
            PipelineOptions { search: SearchOptions { seed: *seed, budget: *budget }, allow_stretch: false },
            m,
        ),
        Command::Patterns { space, file, q, n } => match (file, q, n) {
            (Some(path), None, None) => pattern_sweep(space.as_ref(), path),
            (None, Some(q), Some(n)) => zero_cases(*q, *n),
            _ => bail!("patterns needs either --file or both --q and --n"),
        },
    }
}

fn build(spec: &SpaceSpec) -> Result<PolarSpace> {
    PolarSpace::build(spec).with_context(|| format!("building {spec}"))
}

/// Search results that are negative rather than broken.
fn negative(e: &Error) -> bool {
    matches!(e, Error::Exhausted { .. } | Error::BudgetExhausted { .. } | Error::SearchFailed { .. })
}

fn info(spec: &SpaceSpec) -> Result<Outcome> {
    let s = build(spec)?;
    let (r, e) = (s.rank(), s.parameter());
    let formula = polar_point_count(r, e, s.field().q());
    let ok = formula == s.num_points();
    let summary = json!({
        "space": spec,
        "r": r,
        "e": e,
        "points": s.num_points(),
        "point_formula": formula,
        "generators": s.num_generators(),
        "generator_dim": s.generator_size(),
    });
    let text = format!(
        "{spec}\nr={r} e={e}\npoints={} (formula {formula})\ngenerators={} of {} points each\n",
        s.num_points(),
        s.num_generators(),
        s.generator_size()
    );
    Ok(Outcome::new(ok, text, &summary).with_file("info.json", &summary))
}

#[derive(Serialize)]
struct GeneratorsFile {
    space: SpaceSpec,
    modulus: Vec<u32>,
    count: usize,
    /// Canonical basis rows of each generator.
    generators: Vec<Vec<Vec<u32>>>,
}

fn generators(spec: &SpaceSpec) -> Result<Outcome> {
    let s = build(spec)?;
    let file = GeneratorsFile {
        space: *spec,
        modulus: s.field().modulus().to_vec(),
        count: s.num_generators(),
        generators: s.generators().iter().map(subspace_rows).collect(),
    };
    let text = format!("{spec}: {} generators\n", file.count);
    Ok(Outcome::new(true, text, json!({ "space": spec, "count": file.count })).with_file("generators.json", &file))
}

fn point_file(space: &PolarSpace, path: Option<&Path>) -> Result<PointSet> {
    match path {
        None => Ok(PointSet::empty(space.num_points())),
        Some(p) => {
            let file: PointSetFile = read_json(p)?;
            file.to_pointset(space).with_context(|| format!("reading {}", p.display()))
        }
    }
}

fn ovoid_search(
    spec: &SpaceSpec,
    m: usize,
    opts: SearchOptions,
    include: Option<&Path>,
    exclude: Option<&Path>,
) -> Result<Outcome> {
    let s = build(spec)?;
    let (inc, exc) = (point_file(&s, include)?, point_file(&s, exclude)?);
    match ovoids::find_m_ovoid(&s, m, &inc, &exc, &opts) {
        Ok(set) => {
            let cert = ovoids::verify_m_ovoid(&s, &set);
            let ok = cert.ok && cert.m == Some(m);
            let text = format!("{spec}: {} points, {}\n", set.len(), histogram_text(&cert));
            Ok(Outcome::new(ok, text, &cert)
                .with_file("ovoid.json", &PointSetFile::for_ovoid(&s, &set, Some(m)))
                .with_file("cert.json", &cert))
        }
        Err(e) if negative(&e) => {
            let report = json!({ "space": spec, "m": m, "found": false, "reason": e.to_string() });
            Ok(Outcome::new(false, format!("{spec}: no {m}-ovoid: {e}\n"), &report).with_file("search.json", &report))
        }
        Err(e) => Err(e.into()),
    }
}

fn histogram_text(cert: &OvoidCertificate) -> String {
    let parts: Vec<String> = cert.histogram.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    let m = cert.m.map_or("none".to_string(), |m| m.to_string());
    format!("ok={} m={m} histogram {{{}}}", cert.ok, parts.join(", "))
}

fn ovoid_verify(space: Option<&SpaceSpec>, path: &Path) -> Result<Outcome> {
    let file: PointSetFile = read_json(path)?;
    let spec = match (space, file.space) {
        (Some(s), _) => *s,
        (None, Some(s)) => s,
        (None, None) => bail!("{} records no space; pass --space", path.display()),
    };
    let s = build(&spec)?;
    let cert = match file.to_pointset(&s) {
        Ok(set) => ovoids::verify_m_ovoid(&s, &set),
        Err(Error::PointNotInSpace) => OvoidCertificate {
            space: spec,
            modulus: s.field().modulus().to_vec(),
            m: None,
            size: file.points.len(),
            histogram: BTreeMap::new(),
            ok: false,
            perp_in: None,
            perp_out: None,
        },
        Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
    };
    let claim_holds = file.claimed_m.is_none_or(|m| cert.m == Some(m));
    let mut text = format!("{spec}: {} points, {}\n", cert.size, histogram_text(&cert));
    if !claim_holds {
        writeln!(text, "claimed m={} does not hold", file.claimed_m.unwrap()).unwrap();
    }
    Ok(Outcome::new(cert.ok && claim_holds, text, &cert).with_file("cert.json", &cert))
}

fn census_form(f: &FieldCtx, method: SpreadMethod, alpha: u32) -> polarforge::forms::Form {
    match method {
        SpreadMethod::Char3 => klein::char3_census_form(f),
        SpreadMethod::Desarguesian => klein::desarguesian_census_form(f, alpha),
    }
}

fn method_name(method: SpreadMethod) -> &'static str {
    match method {
        SpreadMethod::Char3 => "char3",
        SpreadMethod::Desarguesian => "desarguesian",
    }
}

fn make_spread(q: u64, method: SpreadMethod, alpha: Option<u32>) -> Result<(FieldCtx, Spread, SpreadFile)> {
    let f = FieldCtx::new(q)?;
    let alpha = alpha.unwrap_or_else(|| f.nonsquare());
    let spread = match method {
        SpreadMethod::Char3 => klein::char3_spread(&f)?,
        SpreadMethod::Desarguesian => klein::desarguesian_spread(&f, alpha)?,
    };
    let form = census_form(&f, method, alpha);
    let counts = klein::spread_census(&f, &spread, &form)?;
    let block = CensusBlock { form_gram: form.orthogonality_matrix().to_rows(), counts };
    let file = SpreadFile::new(&f, method_name(method), &spread, Some(block));
    Ok((f, spread, file))
}

fn census_text(c: &Census) -> String {
    format!("external={} tangent={} bisecant={}\n", c.external, c.tangent, c.bisecant)
}

fn spread_build(q: u64, method: SpreadMethod, alpha: Option<u32>) -> Result<Outcome> {
    let (_, spread, file) = make_spread(q, method, alpha)?;
    let counts = file.census.as_ref().expect("built with a census").counts;
    let text = format!("{} lines\n{}", spread.len(), census_text(&counts));
    let summary = json!({ "q": q, "method": file.method, "lines": spread.len(), "census": counts });
    Ok(Outcome::new(counts.tangent == 0, text, &summary).with_file("spread.json", &file))
}

fn spread_census(q: u64, method: SpreadMethod, alpha: Option<u32>) -> Result<Outcome> {
    let (_, _, file) = make_spread(q, method, alpha)?;
    let block = file.census.expect("built with a census");
    Ok(Outcome::new(block.counts.tangent == 0, census_text(&block.counts), &block).with_file("census.json", &block))
}

fn spread_census_file(path: &Path) -> Result<Outcome> {
    let file: SpreadFile = read_json(path)?;
    let f = file.field()?;
    let spread = file.spread().with_context(|| format!("{} is not a spread", path.display()))?;
    let form = match &file.census {
        Some(block) => {
            let gram = polarforge::linalg::Matrix::from_rows(&block.form_gram);
            polarforge::forms::Form::Quadratic(polarforge::forms::QuadraticForm::from_gram(gram)?)
        }
        None => match file.method.as_str() {
            "char3" => klein::char3_census_form(&f),
            "desarguesian" => klein::desarguesian_census_form(&f, f.nonsquare()),
            other => bail!("unknown spread method {other:?} and no census form recorded"),
        },
    };
    let counts = klein::spread_census(&f, &spread, &form)?;
    let block = CensusBlock { form_gram: form.orthogonality_matrix().to_rows(), counts };
    let mut ok = counts.tangent == 0;
    let mut text = census_text(&counts);
    if let Some(recorded) = &file.census {
        if recorded.counts != counts {
            ok = false;
            text.push_str("recorded census differs\n");
        }
    }
    Ok(Outcome::new(ok, text, &block).with_file("census.json", &block))
}

#[derive(Serialize)]
struct KleinEntry {
    line: Vec<Vec<u32>>,
    point: Vec<u32>,
}

fn klein_map(q: u64) -> Result<Outcome> {
    let f = FieldCtx::new(q)?;
    let form = klein::klein_form(&f);
    let lines = enumerate_subspaces(3, 1, &f);
    let entries: Vec<KleinEntry> = lines
        .iter()
        .map(|l| {
            let p = klein::line_to_klein(&f, l)?;
            Ok(KleinEntry { line: subspace_rows(l), point: p.coords().to_vec() })
        })
        .collect::<polarforge::Result<_>>()?;
    let on_quadric = entries.iter().all(|e| form.is_singular_vector(&f, &e.point));
    let distinct: BTreeSet<&Vec<u32>> = entries.iter().map(|e| &e.point).collect();
    let quadric_points = polar_point_count(3, 0, f.q());
    let ok = on_quadric && distinct.len() == entries.len() && distinct.len() == quadric_points;
    let summary = json!({
        "q": q,
        "lines": entries.len(),
        "distinct_images": distinct.len(),
        "quadric_points": quadric_points,
        "on_quadric": on_quadric,
        "bijective": ok,
    });
    let text = format!("{} lines -> {} distinct points of Q+(5,{q}) ({} total); bijective={ok}\n", entries.len(), distinct.len(), quadric_points);
    Ok(Outcome::new(ok, text, &summary)
        .with_file("klein.json", &json!({ "q": q, "modulus": f.modulus(), "map": entries })))
}

fn glue(q: u64, opts: PipelineOptions) -> Result<Outcome> {
    let (space, report) = match pipelines::glue_construct(q, &opts) {
        Ok(r) => r,
        Err(e) if negative(&e) => return Ok(failed_search("glue", &e)),
        Err(e) => return Err(e.into()),
    };
    let ok = report.ok();
    let mut text = String::new();
    writeln!(text, "O1: {}", histogram_text(&report.cert_o1)).unwrap();
    writeln!(text, "O2: {}", histogram_text(&report.cert_o2)).unwrap();
    writeln!(text, "union ({} points): {}", report.union.len(), histogram_text(&report.cert_union)).unwrap();
    writeln!(text, "disjointness argument holds={}", report.disjointness.holds).unwrap();
    let summary = json!({ "ok": ok, "union": report.cert_union, "disjointness": report.disjointness.holds });
    let mut out = Outcome::new(ok, text, &summary);
    out.files = report.files(&space);
    Ok(out)
}

fn failed_search(what: &str, e: &Error) -> Outcome {
    let report = json!({ "pipeline": what, "ok": false, "reason": e.to_string() });
    Outcome::new(false, format!("{what}: {e}\n"), &report).with_file("search.json", &report)
}

fn disjoint_family(opts: PipelineOptions, ms: &[usize]) -> Result<Outcome> {
    let (space, family) = match pipelines::five_disjoint_2ovoids(&opts) {
        Ok(r) => r,
        Err(e) if negative(&e) => return Ok(failed_search("disjoint-family", &e)),
        Err(e) => return Err(e.into()),
    };
    let mut ok = family.ok();
    let mut text = String::new();
    writeln!(text, "census of the spread: {}", census_text(&family.census).trim_end()).unwrap();
    for (i, c) in family.certificates.iter().enumerate() {
        writeln!(text, "O{}: {}", i + 1, histogram_text(c)).unwrap();
    }
    writeln!(text, "pairwise disjoint={}", family.pairwise_disjoint).unwrap();
    let mut files = family.files(&space);
    let mut unions = BTreeMap::new();
    for &m in ms {
        let (set, cert) = pipelines::m_ovoids_q3(&space, &family, m)?;
        ok &= cert.ok && cert.m == Some(m);
        writeln!(text, "union of {} -> {}", m / 2, histogram_text(&cert)).unwrap();
        files.push((format!("m{m}.json"), to_json(&PointSetFile::for_ovoid(&space, &set, Some(m)))));
        files.push((format!("cert_m{m}.json"), to_json(&cert)));
        unions.insert(m, cert.ok && cert.m == Some(m));
    }
    let summary = json!({
        "ok": ok,
        "pairwise_disjoint": family.pairwise_disjoint,
        "certificates": family.certificates,
        "unions": unions,
    });
    let mut out = Outcome::new(ok, text, &summary);
    out.files = files;
    Ok(out)
}

#[derive(Serialize)]
struct SweepFile {
    space: SpaceSpec,
    sections: usize,
    /// `x` → number of sections.
    distribution: BTreeMap<usize, usize>,
    /// `(x, c)` → number of sections.
    patterns: BTreeMap<String, usize>,
}

fn pattern_sweep(space: Option<&SpaceSpec>, path: &Path) -> Result<Outcome> {
    let file: PointSetFile = read_json(path)?;
    let spec = match space.copied().or(file.space) {
        Some(s) => s,
        None => bail!("{} records no space; pass --space", path.display()),
    };
    let s = build(&spec)?;
    let set = file.to_pointset(&s)?;
    let sweep = match ovoids::pattern_sweep(&s, &set) {
        Ok(sweep) => sweep,
        Err(e @ Error::PatternViolation(_)) => {
            let report = json!({ "space": spec, "ok": false, "reason": e.to_string() });
            return Ok(Outcome::new(false, format!("{e}\n"), &report).with_file("patterns.json", &report));
        }
        Err(e) => return Err(e.into()),
    };
    let mut distribution = BTreeMap::new();
    let mut patterns = BTreeMap::new();
    for (_, p) in &sweep {
        *distribution.entry(p.x).or_insert(0) += 1;
        *patterns.entry(format!("x={} c={}", p.x, p.c)).or_insert(0) += 1;
    }
    let sweep_file = SweepFile { space: spec, sections: sweep.len(), distribution, patterns };
    let mut text = format!("{spec}: {} sections\n", sweep_file.sections);
    for (k, v) in &sweep_file.patterns {
        writeln!(text, "  {k}: {v}").unwrap();
    }
    Ok(Outcome::new(true, text, &sweep_file).with_file("patterns.json", &sweep_file))
}

fn zero_cases(q: u64, n: u32) -> Result<Outcome> {
    if q.is_multiple_of(2) || q < 3 {
        bail!("q must be odd and at least 3");
    }
    let cases = ovoids::pattern_zero_cases(q, n);
    let summary = json!({ "q": q, "n": n, "kind": PolarKind::Elliptic.symbol(), "zero_cases_c_m": cases });
    let mut text = format!("q={q} n={n}: {} zero case(s)\n", cases.len());
    for (c, m) in &cases {
        writeln!(text, "  c={c} m={m}").unwrap();
    }
    Ok(Outcome::new(true, text, &summary).with_file("zero_cases.json", &summary))
}
