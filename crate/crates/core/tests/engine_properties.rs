use carpe_core::{DecisionKind, Detection, EngineConfig, FeatureVector, ReidEngine};
use proptest::prelude::*;

const DIM: usize = 3;

#[derive(Debug, Clone)]
struct Frame {
    ids: Vec<u64>,
    feats: Vec<Vec<f64>>,
}

fn frame() -> impl Strategy<Value = Frame> {
    prop::collection::btree_set(1u64..7, 0..4).prop_flat_map(|ids| {
        let ids: Vec<u64> = ids.into_iter().collect();
        let n = ids.len();
        (Just(ids), prop::collection::vec(prop::collection::vec(-2.0f64..2.0, DIM), n))
            .prop_map(|(ids, feats)| Frame { ids, feats })
    })
}

fn detections(f: u64, fr: &Frame) -> Vec<Detection> {
    fr.ids
        .iter()
        .zip(&fr.feats)
        .map(|(&id, v)| Detection {
            frame_index: f,
            timestamp: f as f64 / 30.0,
            track_id: id,
            feature: FeatureVector::new(v.clone()).unwrap(),
            person_id: None,
            bbox: None,
        })
        .collect()
}

fn engine(stable: u32) -> ReidEngine {
    let cfg = EngineConfig {
        blacklist_stable_frames: stable,
        threshold_warmup: 1,
        lambda_init: 2.0,
        ..EngineConfig::with_dim(DIM)
    };
    ReidEngine::new(cfg, 1, &FeatureVector::new(vec![0.0; DIM]).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn per_frame_invariants(frames in prop::collection::vec(frame(), 1..60), stable in 1u32..6) {
        let mut e = engine(stable);
        for (f, fr) in frames.iter().enumerate() {
            let dets = detections(f as u64, fr);
            let before = e.clone();
            let d = e.process_frame(f as u64, &dets).unwrap();
            prop_assert_eq!(d.lambda_snapshot, before.threshold().lambda_d());

            if fr.ids.contains(&before.tracked_id()) {
                prop_assert_eq!(d.kind, DecisionKind::DirectTrack);
                prop_assert_eq!(d.track_id, Some(before.tracked_id()));
            }
            match d.kind {
                DecisionKind::Reidentified => {
                    let id = d.track_id.unwrap();
                    prop_assert!(d.distance.unwrap() < d.lambda_snapshot);
                    prop_assert!(!before.blacklist().contains(&id));
                    prop_assert_eq!(e.stable_run(), 0);
                }
                DecisionKind::Lost => prop_assert_eq!(&e, &before),
                DecisionKind::DirectTrack => {}
            }
            prop_assert!(!e.blacklist().contains(&e.tracked_id()));
            let th = e.threshold();
            prop_assert!(th.lambda_d() >= th.mu_d());
            prop_assert!(e.target().sigma().iter().all(|s| *s >= 0.0));
            prop_assert!(e.target().n_feat() <= e.config().n_max);
        }
    }

    #[test]
    fn replay_is_deterministic(frames in prop::collection::vec(frame(), 1..40)) {
        let (mut a, mut b) = (engine(3), engine(3));
        for (f, fr) in frames.iter().enumerate() {
            let dets = detections(f as u64, fr);
            prop_assert_eq!(a.process_frame(f as u64, &dets).unwrap(), b.process_frame(f as u64, &dets).unwrap());
        }
        prop_assert_eq!(a.fingerprint(), b.fingerprint());
    }
}
