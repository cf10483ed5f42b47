use symlatent::data::{DyadCovariates, Sociomatrix};
use symlatent::eval::*;
use symlatent::mcmc::SamplerConfig;
use symlatent::model::ModelKind;
use symlatent::simulate::{numeric_labels, simulate, SimulationParams};

fn short_cv(jobs: usize) -> CvConfig {
    CvConfig {
        sampler: SamplerConfig {
            iterations: 150,
            burn_in: 50,
            seed: 4,
            ..SamplerConfig::default()
        },
        jobs,
        ..CvConfig::default()
    }
}

fn with_missing() -> Sociomatrix {
    let sim = simulate(ModelKind::Eigen, 16, 2, &SimulationParams::default(), 3).unwrap();
    let y = sim.y;
    let values: Vec<u32> = (0..y.dyad_count()).map(|d| y.value(d).unwrap()).collect();
    let observed = (0..y.dyad_count()).map(|d| d % 9 != 4).collect();
    Sociomatrix::new(numeric_labels(16), values, observed).unwrap()
}

#[test]
fn every_observed_dyad_predicted_exactly_once() {
    let y = with_missing();
    let x = DyadCovariates::none(y.n());
    for kind in ModelKind::ALL {
        let pred = cross_validate(&y, &x, kind, 2, &short_cv(1)).unwrap();
        let mut seen = vec![0usize; y.dyad_count()];
        for f in 1..=5 {
            for d in pred.folds.members(f) {
                seen[d] += 1;
            }
        }
        for d in 0..y.dyad_count() {
            if y.is_observed(d) {
                assert_eq!(seen[d], 1);
                assert!((0.0..=1.0).contains(&pred.yhat[d]));
                assert!(pred.truth[d].is_some());
            } else {
                assert_eq!(seen[d], 0);
                assert!(pred.yhat[d].is_nan());
                assert!(pred.truth[d].is_none());
            }
        }
        let (scores, truth) = pred.scored();
        assert_eq!(scores.len(), y.observed_count());
        assert_eq!(truth.len(), y.observed_count());
    }
}

#[test]
fn thread_count_does_not_change_predictions() {
    let y = with_missing();
    let x = DyadCovariates::none(y.n());
    for kind in ModelKind::ALL {
        let a = cross_validate(&y, &x, kind, 2, &short_cv(1)).unwrap();
        let b = cross_validate(&y, &x, kind, 2, &short_cv(3)).unwrap();
        assert_eq!(a.to_tsv(), b.to_tsv());
        assert_eq!(roc_curve(&a).unwrap(), roc_curve(&b).unwrap());
    }
}

#[test]
fn predictions_file_layout() {
    let y = with_missing();
    let pred = cross_validate(&y, &DyadCovariates::none(y.n()), ModelKind::Class, 2, &short_cv(1)).unwrap();
    let tsv = pred.to_tsv();
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines[0], "i\tj\tfold\ttruth\tyhat");
    assert_eq!(lines.len(), y.dyad_count() + 1);
    assert!(lines[1].starts_with("1\t2\t"));
    let missing = lines.iter().filter(|l| l.contains("\tNA\tNA\t")).count();
    assert_eq!(missing, y.dyad_count() - y.observed_count());
}

#[test]
fn auc_matches_pairwise_count() {
    let scores = [0.9, 0.1, 0.5, 0.5, 0.7, 0.2, 0.5, 0.3];
    let truth = [true, false, true, false, false, true, true, false];
    let roc = roc_from_scores(&scores, &truth).unwrap();
    // positives 0.9, 0.5, 0.2, 0.5 against negatives 0.1, 0.5, 0.7, 0.3:
    // 4 + 2.5 + 1 + 2.5 = 10 of 16
    assert!((roc.auc - 10.0 / 16.0).abs() < 1e-12);
    assert!((auc_pairwise(&scores, &truth).unwrap() - roc.auc).abs() < 1e-12);
}

#[test]
fn roc_file_layout() {
    let roc = roc_from_scores(&[0.2, 0.8], &[false, true]).unwrap();
    assert_eq!(roc.to_tsv(), "fpr\ttpr\n0.0000000000\t0.0000000000\n0.0000000000\t1.0000000000\n1.0000000000\t1.0000000000\n");
}

#[test]
fn roc_errors() {
    assert!(roc_from_scores(&[0.1, f64::NAN], &[true, false]).is_err());
    assert!(roc_from_scores(&[0.1], &[true, false]).is_err());
    assert!(roc_from_scores(&[0.1, 0.2], &[false, false]).is_err());
}

#[test]
fn auc_table_csv() {
    let mut t = AucTable::new(vec!["a".into(), "b".into()], vec![ModelKind::Class, ModelKind::Eigen], vec![3, 5]);
    t.set(3, "a", ModelKind::Class, 0.8249);
    t.set(5, "b", ModelKind::Eigen, 0.5);
    let csv = t.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "K,a/class,a/eigen,b/class,b/eigen");
    assert_eq!(lines[1], "3,0.82,NA,NA,NA");
    assert_eq!(lines[2], "5,NA,NA,NA,0.50");
    let back = AucTable::from_csv(&csv).unwrap();
    assert_eq!(back.to_csv(), csv);
}

#[test]
fn binarize_uses_lowest_level() {
    let y = Sociomatrix::new(numeric_labels(3), vec![2, 5, 2], vec![true, true, false]).unwrap();
    assert_eq!(binarize(&y), vec![Some(false), Some(true), None]);
}
