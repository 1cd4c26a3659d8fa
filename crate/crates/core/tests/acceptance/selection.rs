//! Guided elimination on a constructed problem with the real CV scorer.

use radarclass::classifier::ClassifierConfig;
use radarclass::dataset::SequenceSet;
use radarclass::features::{FeatureRow, FeatureVector};
use radarclass::radar_data::{ClassLabel, InstanceId};
use radarclass::ranking::fuse;
use radarclass::selection::{guided_backward_elimination, rank_task, selection_folds, CvScorer, Passes, SelectionConfig, TaskData, TaskId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut rows = Vec::new();
    for inst in 0..60u32 {
        let label = if inst % 2 == 0 { ClassLabel::Car } else { ClassLabel::Truck };
        let sign = if label == ClassLabel::Car { -1.0 } else { 1.0 };
        for w in 0..3 {
            let informative = sign * rng.random_range(1.0..3.0);
            let mut values = vec![informative, informative];
            values.extend((0..8).map(|_| rng.random_range(-3.0..3.0)));
            rows.push(FeatureRow {
                vector: FeatureVector {
                    values,
                    instance_id: InstanceId(inst),
                    window_start: w as f64 * 0.15,
                    label,
                },
                copy: None,
            });
        }
    }
    let set = SequenceSet::from_rows(&rows, 8);
    let task = TaskId::Ovo(ClassLabel::Car, ClassLabel::Truck);
    let cfg = SelectionConfig {
        top: 1,
        tol: 0.0,
        passes: Passes::Count(1),
        classifier: ClassifierConfig::default(),
        ..SelectionConfig::default()
    };
    let (jmi, ms) = rank_task(task, &set, &cfg, 1).unwrap();
    let fused = fuse(&jmi, &ms, cfg.top).unwrap();
    let folds = selection_folds(&set, cfg.folds, 1).unwrap();
    let data = TaskData::new(task, &set, &folds).unwrap();
    let scorer = CvScorer::new(&data, cfg.folds, cfg.classifier.clone(), 1);
    let (mask, trace) = guided_backward_elimination(task, 10, &fused, &scorer, cfg.tol, cfg.passes).unwrap();
    let active = mask.active_indices();
    let mut expected = fused.fixed_set.clone();
    if !expected.contains(&0) {
        expected.push(0);
        expected.sort_unstable();
    }
    let pass = active == expected && fused.fixed_set == vec![0] && trace.final_score >= trace.initial_score;
    (
        pass,
        format!(
            "fixed {:?}, kept {:?}, 5-fold score {:.4} -> {:.4}",
            fused.fixed_set, active, trace.initial_score, trace.final_score
        ),
    )
}
