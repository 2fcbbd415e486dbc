use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use eosgraph::synth::{gen_mixed_corpus, MixedSpec};
use eosgraph::{ingest_reader, SystemAccounts};

fn ingest(c: &mut Criterion) {
    let (records, _) = gen_mixed_corpus(&MixedSpec::default(), 3);
    let mut text = String::new();
    for r in &records {
        text.push_str(&r.to_json_line());
        text.push('\n');
    }
    let system = SystemAccounts::default();
    let mut group = c.benchmark_group("ingest");
    group.throughput(Throughput::Elements(records.len() as u64));
    group.bench_function("mixed_corpus", |b| {
        b.iter(|| {
            let mut n = 0u64;
            ingest_reader(text.as_bytes(), &system, |_| {
                n += 1;
                Ok(())
            }, |_| {})
            .unwrap();
            n
        })
    });
    group.finish();
}

criterion_group!(benches, ingest);
criterion_main!(benches);
