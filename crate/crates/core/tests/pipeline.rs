use std::io::Write;

use flate2::write::GzEncoder;
use flate2::Compression;

use kbisim::bench::{compare_algorithms, run_algorithm, Algorithm};
use kbisim::brs::{brs_summarize, summary_graph, GsmSpec};
use kbisim::ingest::fixtures::{example_graph, EXAMPLE_NTRIPLES};
use kbisim::ingest::{generate_synthetic, load_ntriples_files, parse_ntriples_str, save_ntriples, GeneratorParams};
use kbisim::oracle::{oracle, OracleVariant};
use kbisim::{partitions_equal, IngestionConfig};

#[test]
fn text_and_gzip_files_load_the_same_graph() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("a.nt");
    let gz = dir.path().join("b.nt.gz");
    std::fs::write(&plain, EXAMPLE_NTRIPLES).unwrap();
    let mut enc = GzEncoder::new(std::fs::File::create(&gz).unwrap(), Compression::default());
    enc.write_all(EXAMPLE_NTRIPLES.as_bytes()).unwrap();
    enc.finish().unwrap();

    let cfg = IngestionConfig::default();
    let a = load_ntriples_files(&[&plain], &cfg).unwrap();
    let b = load_ntriples_files(&[&gz], &cfg).unwrap();
    let both = load_ntriples_files(&[&plain, &gz], &cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.same_structure(&both));
    assert!(a.same_structure(&example_graph()));
}

#[test]
fn generated_graph_survives_export_and_reload() {
    let g = generate_synthetic(&GeneratorParams {
        vertex_count: 300,
        edge_count: 1500,
        edge_labels: 3,
        vertex_labels: 5,
        max_labels_per_vertex: 2,
        skew: 0.8,
        seed: 4,
    })
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.nt");
    let cfg = IngestionConfig::default();
    save_ntriples(&g, &path, &cfg).unwrap();
    let h = load_ntriples_files(&[&path], &cfg).unwrap();
    assert_eq!(g.edge_count(), h.edge_count());
    for alg in [Algorithm::NativeSchaetzle, Algorithm::NativeKaushik] {
        let a = run_algorithm(&g, alg, None, 4, true).unwrap();
        let b = run_algorithm(&h, alg, None, 4, true).unwrap();
        assert_eq!(a.block_counts, b.block_counts, "{alg:?}");
    }
}

#[test]
fn all_four_algorithms_match_their_definitions() {
    let g = parse_ntriples_str(EXAMPLE_NTRIPLES, &IngestionConfig::default()).unwrap();
    for k in 0..4 {
        let elf = oracle(&g, OracleVariant::EdgeLabeledForward, k);
        let vlb = oracle(&g, OracleVariant::VertexLabeledBackward, k);
        let s = run_algorithm(&g, Algorithm::NativeSchaetzle, None, k, true).unwrap();
        let kau = run_algorithm(&g, Algorithm::NativeKaushik, None, k, true).unwrap();
        assert!(partitions_equal(&s.partition, &elf).unwrap());
        assert!(partitions_equal(&kau.partition, &vlb).unwrap());
        assert!(partitions_equal(&brs_summarize(&g, &GsmSpec::schaetzle(k)).partition, &elf).unwrap());
        assert!(partitions_equal(&brs_summarize(&g, &GsmSpec::kaushik(k)).partition, &vlb).unwrap());
    }
}

#[test]
fn cross_algorithm_comparison_on_generated_graph() {
    let g = generate_synthetic(&GeneratorParams {
        vertex_count: 5000,
        edge_count: 30000,
        edge_labels: 6,
        vertex_labels: 20,
        max_labels_per_vertex: 2,
        skew: 1.0,
        seed: 11,
    })
    .unwrap();
    let spec = GsmSpec::schaetzle(6);
    let c = compare_algorithms(&g, (Algorithm::NativeSchaetzle, None), (Algorithm::Brs, Some(&spec)), 6, true).unwrap();
    assert!(c.equal);
    let spec = GsmSpec::kaushik(6);
    let c = compare_algorithms(&g, (Algorithm::NativeKaushik, None), (Algorithm::Brs, Some(&spec)), 6, true).unwrap();
    assert!(c.equal);
}

#[test]
fn summary_graph_of_the_example() {
    let g = example_graph();
    let trace = brs_summarize(&g, &"cp((T,id,T),k=2)".parse().unwrap());
    let q = summary_graph(&g, &trace);
    assert_eq!(q.block_count, 3);
    assert_eq!(q.edges.len(), 3);
}
