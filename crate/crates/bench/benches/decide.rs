use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use forestalg::decide::{decide_hom, nonconfusion, Fragment};
use forestalg::decompose::{decompose_efex, DEFAULT_MAX_SIZE};
use forestalg::fixtures::chain4_hom;
use forestalg::hom::Alphabet;
use forestalg::random::{random_onto_hom, MapStyle};
use forestalg::{parse_formula, to_recognizer};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn nonconfusion_random(c: &mut Criterion) {
    let mut group = c.benchmark_group("nonconfusion");
    group.sample_size(10);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [8, 16, 32, 64] {
        let alpha = random_onto_hom(&mut rng, n, 4, MapStyle::Mixed, 500).expect("random hom");
        group.bench_with_input(BenchmarkId::from_parameter(n), &alpha, |b, alpha| {
            b.iter(|| nonconfusion(alpha).unwrap())
        });
    }
    group.finish();
}

fn syntactic_pipeline(c: &mut Criterion) {
    let psi = "EX(a & !EF b) & EX(b | EF b)";
    let phi = parse_formula(&format!("{psi} | EF({psi})")).unwrap();
    let ab = Alphabet::from_names(&["a", "b"]).unwrap();
    c.bench_function("compile+syntactic+efex", |b| {
        b.iter(|| {
            let rec = to_recognizer(&phi, &ab).unwrap();
            let syn = rec.syntactic().recognizer.hom;
            decide_hom(&syn, Fragment::EFEX).unwrap()
        })
    });
}

fn decompose_chain4(c: &mut Criterion) {
    let alpha = chain4_hom();
    c.bench_function("decompose_efex chain4", |b| b.iter(|| decompose_efex(&alpha, DEFAULT_MAX_SIZE).unwrap()));
}

criterion_group!(benches, nonconfusion_random, syntactic_pipeline, decompose_chain4);
criterion_main!(benches);
