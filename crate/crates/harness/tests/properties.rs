use carpe_core::sim::{generate, AppearanceChange, Occlusion, ScenarioConfig};
use carpe_core::EngineConfig;
use carpe_harness::stream::write_stream_to_vec;
use carpe_harness::{read_stream, run, InitialBinding};
use proptest::prelude::*;

fn scenario_config() -> impl Strategy<Value = ScenarioConfig> {
    (
        any::<u64>(),
        20u64..200,
        1usize..4,
        2usize..9,
        0.5f64..8.0,
        prop::collection::vec((0u64..200, 1u64..60), 0..4),
        prop::option::of(0u64..200),
        any::<bool>(),
    )
        .prop_map(|(seed, frames, persons, dim, sep, occ, change, switch)| {
            let mut c = ScenarioConfig::lab_default(seed);
            c.num_frames = frames;
            c.num_persons = persons.min(dim);
            c.feature_dim = dim;
            c.base_separation = sep;
            c.id_switch_on_reentry = switch;
            c.occlusion_events = occ
                .into_iter()
                .filter(|&(start, _)| start > 0 && start < frames)
                .map(|(start_frame, duration_frames)| Occlusion {
                    person_index: 0,
                    start_frame,
                    duration_frames,
                })
                .collect();
            c.appearance_changes = change
                .filter(|&f| f < frames)
                .map(|frame| AppearanceChange { person_index: 0, frame, magnitude: 0.5 })
                .into_iter()
                .collect();
            c
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn stream_round_trip_is_bit_exact(c in scenario_config()) {
        let s = generate(&c).unwrap();
        let bytes = write_stream_to_vec(&s);
        let back = read_stream(bytes.as_slice()).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(write_stream_to_vec(&back), bytes);
    }

    #[test]
    fn metrics_are_consistent(c in scenario_config()) {
        let s = generate(&c).unwrap();
        let b = InitialBinding::at_start(&s, 0).unwrap();
        let m = run(&s, &EngineConfig::with_dim(c.feature_dim), b).unwrap().metrics;
        prop_assert_eq!(m.direct_frames + m.reidentified_frames + m.lost_frames, c.num_frames);
        prop_assert!(m.mot_tracking_lengths.iter().chain(&m.reid_delays).all(|d| *d >= 0.0));
        let visible: f64 = m.mot_tracking_lengths.iter().sum::<f64>() * c.fps;
        let expected = (0..s.num_frames()).filter(|&f| s.ground_truth.is_visible(f, 0)).count();
        prop_assert!((visible - expected as f64).abs() < 1e-6);
        let reentries = (1..s.num_frames())
            .filter(|&f| s.ground_truth.is_visible(f, 0) && !s.ground_truth.is_visible(f - 1, 0))
            .count() as u64;
        prop_assert_eq!(m.reid_delays.len() as u64 + m.unrecovered_reentries, reentries);
        prop_assert!(m.misid_count <= m.misid_frames);
        prop_assert!(m.reid_count <= m.reidentified_frames);
    }
}
