use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use sphereqa_core::media::Plane;
use sphereqa_core::metrics::{
    cpp_psnr_frame, ms_ssim_frame, psnr_frame, spsnr_frame, ssim_frame, ws_psnr_frame, CppSampling,
    SphereSampling,
};
use sphereqa_core::sphere::{
    generate_sphere_points, make_ws_weight_map, CppGrid, ErpGeometry, Kernel,
};

fn frames(w: usize, h: usize) -> (Plane, Plane) {
    let a = Plane::from_fn(w, h, |i, j| ((i * 7 + j * 13) % 256) as u16);
    let b = Plane::from_fn(w, h, |i, j| ((i * 7 + j * 13 + (i ^ j) % 9) % 256) as u16);
    (a, b)
}

fn frame_metrics(c: &mut Criterion) {
    let mut group = c.benchmark_group("frame");
    group.sample_size(20);
    for &(w, h) in &[(704usize, 352usize), (1920, 960)] {
        let geom = ErpGeometry::new(w, h).unwrap();
        let (a, b) = frames(w, h);
        let weights = make_ws_weight_map(geom);
        let points = generate_sphere_points(655_362).unwrap();
        let sphere = SphereSampling::new(&points, geom);
        let cpp = CppSampling::new(&CppGrid::new(w, h).unwrap(), geom);
        let size = format!("{w}x{h}");
        group.bench_with_input(BenchmarkId::new("psnr", &size), &(), |bch, _| {
            bch.iter(|| psnr_frame(black_box(&a), black_box(&b), 255.0))
        });
        group.bench_with_input(BenchmarkId::new("ws_psnr", &size), &(), |bch, _| {
            bch.iter(|| ws_psnr_frame(black_box(&a), black_box(&b), &weights, 255.0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("s_psnr_i", &size), &(), |bch, _| {
            bch.iter(|| {
                spsnr_frame(
                    black_box(&a),
                    black_box(&b),
                    &sphere,
                    Kernel::Bilinear,
                    255.0,
                )
            })
        });
        group.bench_with_input(BenchmarkId::new("cpp_psnr", &size), &(), |bch, _| {
            bch.iter(|| cpp_psnr_frame(black_box(&a), black_box(&b), &cpp, Kernel::Bilinear, 255.0))
        });
        group.bench_with_input(BenchmarkId::new("ssim", &size), &(), |bch, _| {
            bch.iter(|| ssim_frame(black_box(&a), black_box(&b), 255.0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("ms_ssim", &size), &(), |bch, _| {
            bch.iter(|| ms_ssim_frame(black_box(&a), black_box(&b), 255.0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, frame_metrics);
criterion_main!(benches);
