use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::sync::OnceLock;

use chrono::{DateTime, Duration, TimeZone, Utc};
use chrono_tz::Europe::Warsaw;
use proptest::prelude::*;

use tim::classifier::{train, ClassifierConfig, IncidentLabel, TextModel};
use tim::engagement::{cohen_kappa, filter_comments, interaction_summary, reaction_distribution};
use tim::geoparse::{
    detect_mentions, edit_distance, match_toponym, Geocoder, IncidentLocation, TriggerLexicon,
};
use tim::impact::{estimate_impact, point_in_polygon};
use tim::ingest::{
    build_gazetteer, load_gazetteer_csv, load_gtfs_stops, load_posts, load_regions_and_flows, Comment, FlowTable,
    Gazetteer, MobilityRegion, Platform, Post, Toponym, ToponymKind, ToponymSource,
};
use tim::lines::{count_line_mentions, extract_line_mentions, LineMode, LineRegistry};
use tim::report::{export_geojson, IncidentRecord};
use tim::synth::incident_corpus;
use tim::Execution;

fn fixture(path: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(path)
}

fn bigram_model() -> &'static TextModel {
    static MODEL: OnceLock<TextModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        let config = ClassifierConfig {
            hash_buckets: 1 << 12,
            epochs: 5,
            seed: 1,
            ..ClassifierConfig::default()
        };
        train(&incident_corpus(30, 5), &IncidentLabel::label_set(), &config).unwrap().0
    })
}

fn unigram_model() -> &'static TextModel {
    static MODEL: OnceLock<TextModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        let config = ClassifierConfig {
            ngram_order: 1,
            hash_buckets: 1 << 8,
            epochs: 5,
            seed: 2,
            ..ClassifierConfig::default()
        };
        train(&incident_corpus(30, 6), &IncidentLabel::label_set(), &config).unwrap().0
    })
}

fn demo_gazetteer() -> &'static Gazetteer {
    static GAZ: OnceLock<Gazetteer> = OnceLock::new();
    GAZ.get_or_init(|| build_gazetteer(load_gazetteer_csv(fixture("geoparse/gazetteer.csv")).unwrap()))
}

fn demo_regions() -> &'static (Vec<MobilityRegion>, FlowTable) {
    static R: OnceLock<(Vec<MobilityRegion>, FlowTable)> = OnceLock::new();
    R.get_or_init(|| load_regions_and_flows(fixture("demo/regions.geojson"), fixture("demo/flows.csv")).unwrap())
}

const WORDS: &[&str] = &[
    "awaria", "na", "ul.", "Legnickiej", "tramwaj", "linii", "4", "10", "przy", "Placu", "Grunwaldzkim",
    "pętli", "Gaj", "skrzyżowaniu", "Hallera", "/", "Grabiszyńska", ",", ".", "remont", "Rynku", "Świdnickiej",
    "wypadek", "al.", "Armii", "Krajowej", "objazdem", "Zoo", "145", "D",
];

fn post_text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 0..16).prop_map(|w| w.join(" "))
}

fn post_with(id: usize, text: String, reactions: BTreeMap<String, u64>, comments: Vec<String>) -> Post {
    let published_at = Utc.with_ymd_and_hms(2024, 3, 1, 8, 0, 0).unwrap() + Duration::hours(id as i64);
    Post {
        id: format!("p{id}"),
        platform: Platform::Twitter,
        published_at,
        text,
        hashtags: vec![],
        reactions,
        comments: comments
            .into_iter()
            .enumerate()
            .map(|(i, text)| Comment {
                id: format!("c{i}"),
                text,
                author_hash: String::new(),
                published_at,
            })
            .collect(),
    }
}

fn reactions() -> impl Strategy<Value = BTreeMap<String, u64>> {
    prop::collection::btree_map(prop::sample::select(vec!["like", "love", "haha", "wow", "sad", "angry"]).prop_map(String::from), 0u64..500, 0..6)
}

fn label() -> impl Strategy<Value = IncidentLabel> {
    prop::sample::select(IncidentLabel::ALL.to_vec())
}

fn registry() -> LineRegistry {
    let mut r = LineRegistry::new();
    for id in ["4", "10"] {
        r.add(id, LineMode::Tram, &[]).unwrap();
    }
    r.add("145", LineMode::Bus, &[]).unwrap();
    r.add("D", LineMode::Bus, &[]).unwrap();
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // ingest

    #[test]
    fn load_posts_is_idempotent(texts in prop::collection::vec(post_text(), 0..8)) {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        for (i, text) in texts.into_iter().enumerate() {
            let post = post_with(i, text, BTreeMap::new(), vec![]);
            writeln!(file, "{}", serde_json::to_string(&post).unwrap()).unwrap();
        }
        prop_assert_eq!(load_posts(file.path(), None).unwrap(), load_posts(file.path(), None).unwrap());
    }

    #[test]
    fn gtfs_stops_respect_coordinate_ranges(
        stops in prop::collection::vec((-120.0f64..120.0, -200.0f64..200.0), 1..6)
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stops.txt");
        let mut body = String::from("stop_id,stop_name,stop_lat,stop_lon\n");
        for (i, (lat, lon)) in stops.iter().enumerate() {
            body.push_str(&format!("{i},Stop {i},{lat},{lon}\n"));
        }
        fs::write(&path, body).unwrap();
        let all_valid = stops.iter().all(|(lat, lon)| lat.abs() <= 90.0 && lon.abs() <= 180.0);
        match load_gtfs_stops(&path) {
            Ok(toponyms) => {
                prop_assert!(all_valid);
                for t in toponyms {
                    prop_assert!(t.lat.abs() <= 90.0 && t.lon.abs() <= 180.0);
                }
            }
            Err(_) => prop_assert!(!all_valid),
        }
    }

    #[test]
    fn gazetteer_lookup_by_own_name(names in prop::collection::vec("(ul\\. |pl\\. )?[A-ZŁŚŻ][a-ząęół]{1,8}( [A-Z][a-z]{1,6})?", 1..10)) {
        let toponyms: Vec<Toponym> = names
            .iter()
            .map(|n| Toponym {
                name: n.clone(),
                kind: ToponymKind::Street,
                lat: 51.1,
                lon: 17.0,
                source: ToponymSource::Manual,
            })
            .collect();
        let gaz = build_gazetteer(toponyms.clone());
        for t in &toponyms {
            prop_assert!(gaz.lookup(&t.name).contains(&t));
        }
    }

    // classifier

    #[test]
    fn predictions_lie_on_the_simplex(text in post_text()) {
        let p = bigram_model().predict(&text);
        prop_assert!(p.probs.iter().all(|&x| x >= 0.0));
        prop_assert!((p.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert_eq!(p.clone(), bigram_model().predict(&text));
    }

    #[test]
    fn argmax_survives_positive_scaling(text in post_text(), scale in 0.01f64..100.0) {
        let model = bigram_model();
        let mut scaled = model.clone();
        for w in scaled.output_weights_mut() {
            *w *= scale;
        }
        let (a, b) = (model.predict(&text), scaled.predict(&text));
        // exact ties can only be broken differently if scaling collapses distinct logits
        prop_assume!(a.probs.iter().filter(|&&p| p == a.probs.iter().cloned().fold(0.0, f64::max)).count() == 1);
        prop_assert_eq!(a.label, b.label);
    }

    #[test]
    fn unigram_model_ignores_token_order(words in prop::collection::vec(prop::sample::select(WORDS), 1..12), seed in any::<u64>()) {
        let model = unigram_model();
        let mut shuffled = words.clone();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
        let (a, b) = (model.predict(&words.join(" ")), model.predict(&shuffled.join(" ")));
        prop_assert_eq!(&a.label, &b.label);
        for (x, y) in a.probs.iter().zip(&b.probs) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    // geoparse

    #[test]
    fn edit_distance_is_a_metric(a in "\\PC{0,10}", b in "\\PC{0,10}", c in "\\PC{0,10}") {
        let ab = edit_distance(&a, &b);
        prop_assert_eq!(edit_distance(&a, &a), 0);
        prop_assert_eq!(ab, edit_distance(&b, &a));
        prop_assert!(edit_distance(&a, &c) <= ab + edit_distance(&b, &c));
        prop_assert_eq!(ab == 0, a == b);
    }

    #[test]
    fn matches_stay_within_threshold_and_bbox(text in post_text(), threshold in 0.0f64..=1.0) {
        let gaz = demo_gazetteer();
        let lexicon = TriggerLexicon::default();
        for m in detect_mentions(&text, &lexicon) {
            if let Some(r) = match_toponym(&m, gaz, threshold) {
                prop_assert!(r.score <= threshold);
            }
        }
        let geocoder = Geocoder::new(gaz.clone(), lexicon, threshold).unwrap();
        let (min_lat, min_lon, max_lat, max_lon) = gaz.bounding_box().unwrap();
        let locations = geocoder.locate(&text);
        for l in &locations {
            prop_assert!(l.lat >= min_lat && l.lat <= max_lat && l.lon >= min_lon && l.lon <= max_lon);
        }
        prop_assert_eq!(locations, geocoder.locate(&text));
    }

    // lines

    #[test]
    fn line_count_sum_bounds(texts in prop::collection::vec(post_text(), 0..12)) {
        let reg = registry();
        let posts: Vec<Post> = texts.into_iter().enumerate().map(|(i, t)| post_with(i, t, BTreeMap::new(), vec![])).collect();
        let counts = count_line_mentions(&posts, &reg, Execution::Sequential);
        let total: u64 = counts.iter().map(|c| c.post_count).sum();
        let sets: Vec<_> = posts.iter().map(|p| extract_line_mentions(&p.text, &reg)).collect();
        let mentioning = sets.iter().filter(|s| !s.is_empty()).count() as u64;
        let multi = sets.iter().any(|s| s.len() > 1);
        prop_assert!(total >= mentioning);
        prop_assert_eq!(total == mentioning, !multi);

        let mut more = posts.clone();
        more.push(post_with(99, "awaria na ul. Legnickiej".into(), BTreeMap::new(), vec![]));
        prop_assert_eq!(count_line_mentions(&more, &reg, Execution::Sequential), counts);
    }

    // impact

    #[test]
    fn impact_total_is_region_sum_and_monotone(
        incidents in prop::collection::vec((51.05f64..51.15, 16.94f64..17.07, 0i64..(40 * 24 * 60)), 0..12),
        extra in (51.05f64..51.15, 16.94f64..17.07, 0i64..(40 * 24 * 60)),
    ) {
        let (regions, flows) = demo_regions();
        let base = Utc.with_ymd_and_hms(2024, 3, 1, 0, 0, 0).unwrap();
        let to_incident = |(lat, lon, minutes): (f64, f64, i64)| -> (IncidentLocation, DateTime<Utc>) {
            (IncidentLocation { name: String::new(), lat, lon, source_kind: ToponymKind::Stop, confidence: 1.0 },
             base + Duration::minutes(minutes))
        };
        let list: Vec<_> = incidents.into_iter().map(to_incident).collect();
        let report = estimate_impact(&list, regions, flows, Warsaw, Execution::Sequential);
        prop_assert_eq!(report.total_passengers, report.per_region.values().sum::<u64>());
        let mut grown = list.clone();
        grown.push(to_incident(extra));
        let bigger = estimate_impact(&grown, regions, flows, Warsaw, Execution::Sequential);
        prop_assert!(bigger.total_passengers >= report.total_passengers);
        prop_assert_eq!(estimate_impact(&list, regions, flows, Warsaw, Execution::Parallel), report);
    }

    #[test]
    fn point_in_polygon_is_translation_consistent(
        ring in prop::collection::vec((0i32..64, 0i32..64), 3..8),
        point in (0i32..64, 0i32..64),
        offset in (-64i32..64, -64i32..64),
    ) {
        // dyadic coordinates keep every translated value exact
        let f = |v: i32| f64::from(v) / 64.0;
        let base: Vec<(f64, f64)> = ring.iter().map(|&(a, b)| (50.0 + f(a), 17.0 + f(b))).collect();
        let p = (50.0 + f(point.0), 17.0 + f(point.1));
        let (dy, dx) = (f(offset.0), f(offset.1));
        let moved: Vec<(f64, f64)> = base.iter().map(|&(a, b)| (a + dy, b + dx)).collect();
        prop_assert_eq!(point_in_polygon(p, &base), point_in_polygon((p.0 + dy, p.1 + dx), &moved));
    }

    // engagement

    #[test]
    fn kappa_bounds_and_symmetry(pairs in prop::collection::vec((0u8..4, 0u8..4), 1..60)) {
        let (a, b): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        let k = cohen_kappa(&a, &b).unwrap().kappa;
        prop_assert!((-1.0..=1.0).contains(&k));
        prop_assert_eq!(k, cohen_kappa(&b, &a).unwrap().kappa);
        if a.iter().any(|x| *x != a[0]) {
            prop_assert_eq!(cohen_kappa(&a, &a).unwrap().kappa, 1.0);
        }
    }

    #[test]
    fn comment_filter_is_idempotent(texts in prop::collection::vec("[a-z😀🚋 ]{0,30}", 0..8)) {
        let post = post_with(0, String::new(), BTreeMap::new(), texts);
        let once = filter_comments(&post.comments);
        prop_assert_eq!(filter_comments(&once), once);
    }

    #[test]
    fn interactions_and_reactions_are_conserved(
        items in prop::collection::vec((label(), reactions(), 0usize..5), 0..10)
    ) {
        let posts: Vec<(IncidentLabel, Post)> = items
            .into_iter()
            .enumerate()
            .map(|(i, (l, r, n))| (l, post_with(i, String::new(), r, vec!["x".into(); n])))
            .collect();
        let summaries: Vec<_> = posts.iter().map(|(_, p)| interaction_summary(p)).collect();
        let total: u64 = summaries.iter().map(|s| s.interactions).sum();
        let parts: u64 = summaries.iter().map(|s| s.reactions_total + s.comments_total).sum();
        prop_assert_eq!(total, parts);

        let table = reaction_distribution(posts.iter().map(|(l, p)| (*l, &p.reactions)));
        for label in IncidentLabel::ALL {
            let expected: u64 = posts.iter().filter(|(l, _)| *l == label).map(|(_, p)| p.reactions.values().sum::<u64>()).sum();
            prop_assert_eq!(table.row_total(label), expected);
        }
    }

    // report

    #[test]
    fn geojson_features_plus_skipped_equals_records(
        items in prop::collection::vec((label(), prop::option::of((51.0f64..51.2, 16.9f64..17.1))), 0..15)
    ) {
        let records: Vec<IncidentRecord> = items
            .into_iter()
            .enumerate()
            .map(|(i, (label, at))| {
                let post = post_with(i, String::new(), BTreeMap::new(), vec![]);
                let locations = at
                    .map(|(lat, lon)| vec![IncidentLocation { name: "x".into(), lat, lon, source_kind: ToponymKind::Street, confidence: 1.0 }])
                    .unwrap_or_default();
                IncidentRecord::new(&post, label, locations)
            })
            .collect();
        let export = export_geojson(&records);
        prop_assert_eq!(export.collection.features.len() + export.skipped, records.len());
    }
}
