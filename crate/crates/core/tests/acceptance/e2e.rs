//! Full pipeline on the default synthetic scene, plus determinism checks.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use radarclass::pipeline::{evaluate, Pipeline, RunConfig};
use radarclass::radar_data::{dbscan, ClassLabel, DbscanParams, EgoTrack, InstanceId, SensorRig, StPoint};
use radarclass::selection::TaskId;
use radarclass::synthgen::annotate::ingest;
use radarclass::synthgen::{gen_scenario, ClassProfile, GeneratorConfig};

fn profile(cfg: &GeneratorConfig, label: ClassLabel) -> &ClassProfile {
    cfg.profiles.trained(label).expect("trained class")
}

/// A pair is easy when the speed ranges of the two generator profiles are
/// disjoint, hard when they overlap.
fn pair_is_easy(cfg: &GeneratorConfig, a: ClassLabel, b: ClassLabel) -> bool {
    let (pa, pb) = (profile(cfg, a), profile(cfg, b));
    pa.speed_max < pb.speed_min || pb.speed_max < pa.speed_min
}

fn mean(v: &[usize]) -> f64 {
    v.iter().sum::<usize>() as f64 / v.len() as f64
}

pub struct Benchmark {
    pub runtime_ok: (bool, String),
    pub ordering: (bool, String),
    pub detector: (bool, String),
    pub pairs: (bool, String),
}

pub fn benchmark(dir: &Path) -> Benchmark {
    let start = Instant::now();
    let config = RunConfig::default().resolve(None).unwrap();
    let generator = config.generator.clone();
    let pipeline = Pipeline::new(config, dir, true);
    let outcome = pipeline.run_all();
    let secs = start.elapsed().as_secs_f64();
    if let Err(e) = outcome {
        let failed = (false, format!("pipeline failed: {e}"));
        return Benchmark { runtime_ok: failed.clone(), ordering: failed.clone(), detector: failed.clone(), pairs: failed };
    }
    let report = pipeline.load_evaluation().unwrap();
    let proposed = report.result(evaluate::PROPOSED).unwrap().mean_macro_f1();
    let baseline = report.result(evaluate::BASELINE).unwrap().mean_macro_f1();
    let detector = report.result(evaluate::PROPOSED_DETECTOR).unwrap();
    let tpr = detector.tpr_hidden.unwrap_or(0.0);
    let drop = proposed - detector.mean_macro_f1();
    let n_instances = fs::read_to_string(dir.join("gen/truth.txt")).map(|t| t.lines().filter(|l| !l.starts_with('#')).count()).unwrap_or(0);

    let selection = pipeline.load_selection().unwrap();
    let (mut easy, mut hard) = (Vec::new(), Vec::new());
    for (task, sel) in &selection {
        if let TaskId::Ovo(a, b) = *task {
            let n = sel.mask.count();
            if pair_is_easy(&generator, a, b) { easy.push(n) } else { hard.push(n) }
        }
    }
    let sizes = |v: &[(TaskId, usize)]| v.iter().map(|(t, n)| format!("{t}:{n}")).collect::<Vec<_>>().join(" ");
    let listed: Vec<(TaskId, usize)> = selection
        .iter()
        .filter_map(|(t, s)| matches!(t, TaskId::Ovo(..)).then_some((*t, s.mask.count())))
        .collect();
    Benchmark {
        runtime_ok: (secs < 600.0, format!("`all` on {n_instances} instances took {secs:.0} s")),
        ordering: (
            proposed >= baseline - 0.005,
            format!("10-fold macro F1 proposed {proposed:.4} vs shared full set {baseline:.4}"),
        ),
        detector: (
            tpr >= 0.20 && drop <= 0.02,
            format!("{} thr {} -> hidden TPR {tpr:.3}, macro F1 drop {:.2} points", report.hidden.method.name(), report.hidden.thr, drop * 100.0),
        ),
        pairs: (
            !easy.is_empty() && !hard.is_empty() && mean(&easy) <= mean(&hard),
            format!("mean mask size easy {:.1} (n={}) vs hard {:.1} (n={}); {}", mean(&easy), easy.len(), mean(&hard), hard.len(), sizes(&listed)),
        ),
    }
}

/// Connected components of core points, borders attached to the component
/// with the smallest core index among their core neighbours.
fn reference(points: &[StPoint], p: &DbscanParams) -> (Vec<Option<usize>>, Vec<bool>) {
    let n = points.len();
    let near = |a: &StPoint, b: &StPoint| {
        ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)) / p.eps_xy.powi(2) + ((a.t - b.t) / p.eps_t).powi(2) + ((a.v - b.v) / p.eps_v).powi(2) <= 1.0
    };
    let adj: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| near(&points[i], &points[j])).collect()).collect();
    let core: Vec<bool> = adj.iter().map(|r| r.iter().filter(|&&b| b).count() >= p.min_pts).collect();
    let mut comp: Vec<Option<usize>> = vec![None; n];
    for s in 0..n {
        if !core[s] || comp[s].is_some() {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = Some(s);
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if core[v] && adj[u][v] && comp[v].is_none() {
                    comp[v] = Some(s);
                    stack.push(v);
                }
            }
        }
    }
    let labels = (0..n)
        .map(|i| if core[i] { comp[i] } else { (0..n).filter(|&j| core[j] && adj[i][j]).filter_map(|j| comp[j]).min() })
        .collect();
    (labels, core)
}

fn canonical(labels: &[Option<usize>]) -> Vec<Option<usize>> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|l| l.map(|c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        }))
        .collect()
}

pub fn determinism(dir: &Path) -> (bool, String) {
    let toml = "seed = 7\n\
                [generator]\nscale = 0.02\nmin_per_class = 6\n\
                [selection]\nfolds = 3\ntop = 15\n\
                [eval]\nfolds = 3\n";
    let config = RunConfig::from_toml(toml).unwrap().resolve(None).unwrap();
    let mut reports = Vec::new();
    for (run, threads) in [(0, 1), (1, 3)] {
        let out = dir.join(format!("run{run}"));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        if let Err(e) = pool.install(|| Pipeline::new(config.clone(), &out, true).run_all()) {
            return (false, format!("reduced run failed: {e}"));
        }
        let mut files = BTreeMap::new();
        for entry in fs::read_dir(out.join("report")).unwrap() {
            let path = entry.unwrap().path();
            files.insert(path.file_name().unwrap().to_owned(), fs::read(&path).unwrap());
        }
        reports.push(files);
    }
    let identical = reports[0] == reports[1] && !reports[0].is_empty();

    let generator = GeneratorConfig::default();
    let rig = SensorRig::front_half();
    let scene = gen_scenario(&generator, &rig).unwrap();
    let dets = ingest(&scene.detections, &EgoTrack::new(scene.ego.clone()).unwrap(), &rig).unwrap();
    let mut by_instance: BTreeMap<InstanceId, Vec<StPoint>> = BTreeMap::new();
    for (d, id) in dets.iter().zip(&scene.assoc) {
        by_instance.entry(*id).or_default().push(StPoint::from(d));
    }
    let params = DbscanParams::default();
    let (mut checked, mut mismatched) = (0, 0);
    for points in by_instance.values().filter(|p| p.len() <= 200) {
        let got = dbscan(points, &params).unwrap();
        let (labels, core) = reference(points, &params);
        checked += 1;
        if got.core != core || canonical(&got.labels) != canonical(&labels) {
            mismatched += 1;
        }
    }
    (
        identical && checked > 0 && mismatched == 0,
        format!(
            "{} report files byte-identical across 1 and 3 threads: {identical}; DBSCAN mismatches {mismatched}/{checked} instances",
            reports[0].len()
        ),
    )
}
