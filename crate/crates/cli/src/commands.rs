use crate::output::{read_input, real, sha256_hex, versions, write_file, CliError, CliResult, Manifest, Table};
use crate::{Cli, Command, ObjectiveArg};
use crofton::bodies::{polar_volume, polar_volume_zonal, ConvexBody};
use crofton::extremal::{
    chain_from_parts, chain_middle, optimize_revolution, ChainParams, Objective, OptimizerConfig, Verdict,
};
use crofton::harmonic::{cosine_multiplier, ZonalFunction, ZonalMeasure};
use crofton::io::{parse_bodies, parse_specs, write_bodies};
use crofton::minkval::{
    apply, classify_degree1, normalization_radius, ApplyParams, OrbitChoice, Representation, ValuationSpec,
};
use crofton::positivity::{lalpha_scan, positivity_check};
use crofton::quermass::{quermass_pair, McParams, QuermassPair};
use serde_json::json;
use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

pub enum Outcome {
    Ok,
    Violated(String),
}

/// Applies `f` to every item on `workers` threads; the output order is the input order.
fn par_map<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if workers <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    let results = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|s| {
        for _ in 0..workers.min(items.len()) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= items.len() {
                    break;
                }
                let r = f(&items[k]);
                results.lock().expect("result slots")[k] = Some(r);
            });
        }
    });
    slots.into_iter().map(|r| r.expect("every slot filled")).collect()
}

struct Run<'a> {
    cli: &'a Cli,
    inputs: BTreeMap<String, String>,
    seeds: Vec<u64>,
}

impl<'a> Run<'a> {
    fn new(cli: &'a Cli) -> Self {
        Self { cli, inputs: BTreeMap::new(), seeds: cli.common.seed.into_iter().collect() }
    }

    fn read(&mut self, path: &Path) -> CliResult<String> {
        let text = read_input(path)?;
        self.inputs.insert(path.display().to_string(), sha256_hex(text.as_bytes()));
        Ok(text)
    }

    fn bodies(&mut self, path: &Path) -> CliResult<Vec<(String, ConvexBody)>> {
        let t = self.read(path)?;
        parse_bodies(&t).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn specs(&mut self, path: &Path) -> CliResult<Vec<(String, ValuationSpec)>> {
        let t = self.read(path)?;
        parse_specs(&t).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn seed(&self, what: &str) -> CliResult<u64> {
        self.cli.common.seed.ok_or_else(|| CliError::Input(format!("`{what}` samples at random: --seed is required")))
    }

    fn mc(&self, what: &str) -> CliResult<McParams> {
        Ok(McParams { samples: self.cli.common.samples, seed: self.seed(what)?, stratified: true })
    }

    fn apply_params(&self) -> ApplyParams {
        ApplyParams { orbit: OrbitChoice::Product { degree: self.cli.common.orbit_degree } }
    }

    fn chain_params(&self, n: usize, mc: McParams) -> CliResult<ChainParams> {
        let p = match &self.cli.common.grid {
            Some(g) => ChainParams::new(n, g[0], g[1], mc, self.apply_params())?,
            None => {
                let mut p = ChainParams::default_for(n, mc)?;
                p.apply = self.apply_params();
                p
            }
        };
        Ok(p)
    }

    /// Configuration hash: everything that can change results, including input contents.
    fn config(&self) -> CliResult<(serde_json::Value, String)> {
        let mut v = serde_json::to_value(self.cli)?;
        if let Some(c) = v.get_mut("common").and_then(|c| c.as_object_mut()) {
            for k in ["out", "manifest", "workers"] {
                c.remove(k);
            }
        }
        let hashed = json!({ "config": v, "inputs": self.inputs });
        Ok((v, sha256_hex(serde_json::to_string(&hashed)?.as_bytes())))
    }

    fn finish(self, name: &str, table: &Table, results: serde_json::Value) -> CliResult<()> {
        let bytes = table.to_bytes()?;
        let c = &self.cli.common;
        match &c.out {
            Some(p) => write_file(p, &bytes)?,
            None => {
                use std::io::Write;
                std::io::stdout()
                    .write_all(&bytes)
                    .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
            }
        }
        let target = c.manifest.clone().or_else(|| {
            c.out.as_ref().map(|p| {
                let mut s = p.clone().into_os_string();
                s.push(".manifest.json");
                s.into()
            })
        });
        if let Some(path) = target {
            let (config, config_hash) = self.config()?;
            let m = Manifest {
                command: name.to_string(),
                config_hash,
                config,
                inputs: self.inputs,
                seeds: self.seeds,
                versions: versions(),
                output_sha256: sha256_hex(&bytes),
                results,
            };
            let mut text = serde_json::to_string_pretty(&m)?;
            text.push('\n');
            write_file(&path, text.as_bytes())?;
        }
        Ok(())
    }
}

fn verdict(v: Verdict) -> String {
    v.as_str().to_string()
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let mut run = Run::new(cli);
    let workers = cli.common.workers.max(1);
    match &cli.command {
        Command::Quermass { bodies, i } => {
            let bodies = run.bodies(bodies)?;
            let mc = run.mc("quermass")?;
            let jobs: Vec<(usize, usize)> = bodies
                .iter()
                .enumerate()
                .flat_map(|(b, (_, k))| {
                    let n = k.dim();
                    let list: Vec<usize> = if i.is_empty() { (1..n).collect() } else { i.clone() };
                    list.into_iter().map(move |j| (b, j))
                })
                .collect();
            let out = par_map(&jobs, workers, |&(b, j)| quermass_pair(&bodies[b].1, j, &mc));
            let mut t = Table::new(&["body", "n", "i", "estimator", "value", "std_error", "samples", "effective_samples", "seed"]);
            for ((b, j), r) in jobs.iter().zip(out) {
                let r = r?;
                let (id, k) = &bodies[*b];
                for (name, q) in [("W", r.w), ("A", r.a)] {
                    t.push(vec![
                        id.clone(),
                        k.dim().to_string(),
                        j.to_string(),
                        name.into(),
                        real(q.value),
                        real(q.std_error),
                        q.samples.to_string(),
                        real(q.effective_samples),
                        mc.seed.to_string(),
                    ]);
                }
            }
            run.finish("quermass", &t, json!({}))?;
            Ok(Outcome::Ok)
        }
        Command::Chain { bodies, specs, left_only } => {
            let bodies = run.bodies(bodies)?;
            let specs = run.specs(specs)?;
            for (id, s) in &specs {
                if !s.is_nonneg_crofton() && !left_only {
                    return Err(CliError::Input(format!(
                        "valuation `{id}` ({}) has no nonnegative Crofton measure, so the right inequality does not apply; \
                         pass --left-only to check only the left inequality",
                        s.tag()
                    )));
                }
            }
            let mc = run.mc("chain")?;
            let mut params: HashMap<usize, Arc<ChainParams>> = HashMap::new();
            for (_, k) in &bodies {
                if let std::collections::hash_map::Entry::Vacant(e) = params.entry(k.dim()) {
                    e.insert(Arc::new(run.chain_params(k.dim(), mc)?));
                }
            }
            let normalized = specs
                .iter()
                .map(|(id, s)| Ok((id.clone(), normalization_radius(s)?)))
                .collect::<CliResult<Vec<_>>>()?;
            // One Kubota sample per (body, degree) serves every valuation of that degree.
            let mut degrees: Vec<(usize, usize)> = Vec::new();
            for (b, (_, k)) in bodies.iter().enumerate() {
                for (_, s) in &normalized {
                    if s.spec.n == k.dim() && !degrees.contains(&(b, s.spec.i)) {
                        degrees.push((b, s.spec.i));
                    }
                }
            }
            let pairs: Vec<crofton::Result<QuermassPair>> =
                par_map(&degrees, workers, |&(b, i)| quermass_pair(&bodies[b].1, i, &mc));
            let mut kubota = HashMap::new();
            for (key, p) in degrees.into_iter().zip(pairs) {
                kubota.insert(key, p?);
            }
            let jobs: Vec<(usize, usize)> = (0..bodies.len())
                .flat_map(|b| (0..normalized.len()).map(move |s| (b, s)))
                .filter(|&(b, s)| normalized[s].1.spec.n == bodies[b].1.dim())
                .collect();
            let skipped = bodies.len() * normalized.len() - jobs.len();
            let middles = par_map(&jobs, workers, |&(b, s)| {
                let k = &bodies[b].1;
                chain_middle(&normalized[s].1, k, &params[&k.dim()])
            });
            let mut t = Table::new(&[
                "body", "spec", "n", "i", "q1", "q2", "q3", "se1", "se2", "se3", "left", "right", "left_equal", "right_equal",
            ]);
            let mut violations = 0;
            for (&(b, s), m) in jobs.iter().zip(middles) {
                let (sid, spec) = &normalized[s];
                let n = spec.spec.n;
                let nonneg = spec.spec.is_nonneg_crofton() && !left_only;
                let r = chain_from_parts(n, spec.spec.i, &kubota[&(b, spec.spec.i)], m?, nonneg);
                if r.violated() {
                    violations += 1;
                }
                let mut row = vec![bodies[b].0.clone(), sid.clone(), n.to_string(), spec.spec.i.to_string()];
                row.extend(r.q.iter().map(|&x| real(x)));
                row.extend(r.std_error.iter().map(|&x| real(x)));
                row.extend([verdict(r.left), verdict(r.right), r.left_equal.to_string(), r.right_equal.to_string()]);
                t.push(row);
            }
            run.finish("chain", &t, json!({ "violations": violations, "skipped_dimension_mismatch": skipped }))?;
            if violations > 0 {
                return Ok(Outcome::Violated(format!("{violations} chain ordering violation(s) beyond 3 standard errors")));
            }
            Ok(Outcome::Ok)
        }
        Command::LalphaScan { n, i, step } => {
            let scan = lalpha_scan(*n, *i, *step)?;
            let mut t = Table::new(&["alpha", "is_support", "is_zonoid", "crofton_nonneg", "I_min"]);
            for (c, m) in &scan.rows {
                t.push(vec![
                    real(c.alpha),
                    c.is_support.to_string(),
                    c.is_zonoid.to_string(),
                    c.crofton_nonneg.to_string(),
                    real(*m),
                ]);
            }
            let results = json!({
                "support": [scan.support.0, scan.support.1],
                "zonoid_lower": scan.zonoid_lower,
                "crofton": [scan.crofton.0, scan.crofton.1],
                "window": scan.window.map(|w| vec![w.0, w.1]),
            });
            run.finish("lalpha-scan", &t, results)?;
            Ok(Outcome::Ok)
        }
        Command::CroftonCheck { specs, resolution } => {
            let specs = run.specs(specs)?;
            let mut t = Table::new(&["spec", "n", "i", "variant", "nonneg", "min", "argmin"]);
            for (id, s) in &specs {
                let row = match &s.repr {
                    Representation::Generating(f) => {
                        // Pre-image under the cosine transform on even degrees; odd degrees do not enter the sign.
                        let g = ZonalFunction::new(
                            s.n,
                            (0..=f.degree())
                                .map(|k| if k % 2 == 0 { f.coeff(k) / cosine_multiplier(s.n, k) } else { 0.0 })
                                .collect(),
                        );
                        let r = positivity_check(&g, s.n, s.i, *resolution)?;
                        (r.nonneg.to_string(), real(r.min), real(r.argmin))
                    }
                    Representation::Crofton { atoms, nonneg } => {
                        let (m, a) = atoms.iter().fold((f64::INFINITY, f64::NAN), |acc, &(t, w)| if w < acc.0 { (w, t) } else { acc });
                        (nonneg.to_string(), real(m), real(a))
                    }
                    _ => (s.is_nonneg_crofton().to_string(), String::new(), String::new()),
                };
                t.push(vec![id.clone(), s.n.to_string(), s.i.to_string(), s.tag().into(), row.0, row.1, row.2]);
            }
            run.finish("crofton-check", &t, json!({}))?;
            Ok(Outcome::Ok)
        }
        Command::Apply { bodies, specs } => {
            let bodies = run.bodies(bodies)?;
            let specs = run.specs(specs)?;
            let ap = run.apply_params();
            let mut grids: BTreeMap<usize, Arc<crofton::sphquad::SphereGrid>> = BTreeMap::new();
            for (_, k) in &bodies {
                let n = k.dim();
                if let std::collections::btree_map::Entry::Vacant(e) = grids.entry(n) {
                    e.insert(run.chain_params(n, McParams::default())?.fine.clone());
                }
            }
            let jobs: Vec<(usize, usize)> = (0..bodies.len())
                .flat_map(|b| (0..specs.len()).map(move |s| (b, s)))
                .filter(|&(b, s)| specs[s].1.n == bodies[b].1.dim())
                .collect();
            let fields = par_map(&jobs, workers, |&(b, s)| apply(&specs[s].1, &bodies[b].1, &grids[&bodies[b].1.dim()], &ap));
            let mut t = Table::new(&["body", "spec", "node", "u", "h"]);
            for (&(b, s), f) in jobs.iter().zip(fields) {
                let f = f?;
                for (j, (u, h)) in f.grid.nodes.iter().zip(&f.values).enumerate() {
                    let u = u.iter().map(|&x| real(x)).collect::<Vec<_>>().join(" ");
                    t.push(vec![bodies[b].0.clone(), specs[s].0.clone(), j.to_string(), u, real(*h)]);
                }
            }
            run.finish("apply", &t, json!({}))?;
            Ok(Outcome::Ok)
        }
        Command::PolarVolume { bodies } => {
            let bodies = run.bodies(bodies)?;
            let out = par_map(&bodies, workers, |(_, k)| -> CliResult<(f64, f64, f64)> {
                let v = k.volume()?;
                let (p, e) = match k {
                    ConvexBody::Revolution(r) => {
                        let a = polar_volume_zonal(&r.profile, 512)?;
                        (a, (a - polar_volume_zonal(&r.profile, 256)?).abs())
                    }
                    _ => {
                        let params = run.chain_params(k.dim(), McParams::default())?;
                        let a = polar_volume(&k.support_field(&params.fine))?;
                        (a, (a - polar_volume(&k.support_field(&params.coarse))?).abs())
                    }
                };
                Ok((v, p, e))
            });
            let mut t = Table::new(&["body", "n", "volume", "polar_volume", "polar_error", "product"]);
            for ((id, k), r) in bodies.iter().zip(out) {
                let (v, p, e) = r?;
                t.push(vec![id.clone(), k.dim().to_string(), real(v), real(p), real(e), real(v * p)]);
            }
            run.finish("polar-volume", &t, json!({}))?;
            Ok(Outcome::Ok)
        }
        Command::Optimize { specs, spec, objective, degree, multistarts, budget, init_scale, best } => {
            let specs = run.specs(specs)?;
            let s = specs
                .iter()
                .find(|(id, _)| id == spec)
                .map(|(_, s)| s.clone())
                .ok_or_else(|| CliError::Input(format!("no valuation `{spec}` in the spec file")))?;
            let seed = run.seed("optimize")?;
            let cfg = OptimizerConfig {
                objective: match objective {
                    ObjectiveArg::MaxPolarProduct => Objective::MaxPolarProduct,
                    ObjectiveArg::MinNonpolarRatio => Objective::MinNonpolarRatio,
                },
                degree: *degree,
                multistarts: *multistarts,
                budget: *budget,
                seed,
                init_scale: *init_scale,
            };
            run.seeds.extend((0..*multistarts as u64).map(|s| 100 + s));
            let trace = optimize_revolution(&s, &cfg)?;
            let mut t = Table::new(&["start", "evaluation", "objective", "projections", "coeffs"]);
            for e in &trace.history {
                t.push(vec![
                    e.start.to_string(),
                    e.evaluation.to_string(),
                    real(e.objective),
                    e.projections.to_string(),
                    e.coeffs.iter().map(|&c| real(c)).collect::<Vec<_>>().join(" "),
                ]);
            }
            if let Some(p) = best {
                let text = write_bodies(&[(format!("{spec}_best"), ConvexBody::Revolution(trace.best.clone()))]);
                write_file(p, text.as_bytes())?;
            }
            let results = json!({
                "best_objective": trace.best_objective,
                "best_error": trace.best_error,
                "ball_objective": trace.ball_objective,
                "ball_error": trace.ball_error,
                "best_distance_to_ball": trace.best_distance_to_ball,
                "evaluations": trace.evaluations,
                "projections": trace.projections,
                "budget_exhausted": trace.budget_exhausted,
            });
            run.finish("optimize", &t, results)?;
            Ok(Outcome::Ok)
        }
        Command::Classify { n, density, atom } => {
            let atoms = atom
                .iter()
                .map(|a| {
                    let (t, w) = a.split_once(':').ok_or_else(|| CliError::Input(format!("atom `{a}` is not t:w")))?;
                    let parse = |x: &str| x.trim().parse::<f64>().map_err(|_| CliError::Input(format!("atom `{a}`: bad number")));
                    Ok((parse(t)?, parse(w)?))
                })
                .collect::<CliResult<Vec<_>>>()?;
            if !(3..=5).contains(n) {
                return Err(CliError::Core(crofton::Error::UnsupportedDimension(*n)));
            }
            let mu = ZonalMeasure {
                n: *n,
                density: (!density.is_empty()).then(|| ZonalFunction::new(*n, density.clone())),
                atoms,
            };
            let r = classify_degree1(&mu);
            let mut t = Table::new(&["class", "min_density", "best_linear_shift", "alpha"]);
            let class = match r.class {
                crofton::minkval::Degree1Class::Monotone => "monotone",
                crofton::minkval::Degree1Class::WeaklyMonotone => "weakly-monotone",
                crofton::minkval::Degree1Class::Neither => "neither",
            };
            t.push(vec![class.into(), real(r.min_density), real(r.best_linear_shift), real(r.alpha)]);
            run.finish("classify", &t, json!({}))?;
            Ok(Outcome::Ok)
        }
    }
}
