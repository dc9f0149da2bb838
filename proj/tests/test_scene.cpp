// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "sspg/brdf.hpp"
#include "sspg/scene_io.hpp"
#include "test_support.hpp"

using namespace sspg;

namespace {

int count_quads(const Scene& s) {
    int n = 0;
    for (const auto& p : s.primitives) n += std::holds_alternative<Quad>(p) ? 1 : 0;
    return n;
}

const char* kMinimal = R"({
  "materials": [
    {"name": "grey", "kind": "diffuse", "albedo": [0.5, 0.5, 0.5]},
    {"name": "lamp", "kind": "diffuse", "albedo": [0, 0, 0], "emission": [1, 1, 1]}
  ],
  "primitives": [
    {"type": "quad", "corner": [-1, 0, -1], "edge_u": [0, 0, 2], "edge_v": [2, 0, 0], "material": "grey"},
    {"type": "quad", "corner": [-0.5, 2, -0.5], "edge_u": [1, 0, 0], "edge_v": [0, 0, 1], "material": 1}
  ],
  "camera": [{"frame": 0, "origin": [0, 1, 3], "look_at": [0, 1, 0], "up": [0, 1, 0], "fov_deg": 45}]
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    if (pos != std::string::npos) s.replace(pos, from.size(), to);
    return s;
}

Material diffuse(double a) {
    Material m;
    m.albedo = Rgb(a);
    return m;
}

Material glossy(double roughness, double f0 = 0.9) {
    Material m;
    m.kind = MaterialKind::Glossy;
    m.albedo = Rgb(f0);
    m.roughness = roughness;
    return m;
}

Scene single_quad_emitter(const Vec3& normal_side) {
    Scene s;
    Material lamp;
    lamp.emission = {2, 3, 4};
    s.materials.push_back(lamp);
    // 1x1 quad in the z=0 plane centered at the origin.
    Quad q{{-0.5, -0.5, 0}, {1, 0, 0}, {0, 1, 0}, 0};
    if (normal_side.z < 0) q = Quad{{-0.5, -0.5, 0}, {0, 1, 0}, {1, 0, 0}, 0};
    s.primitives.push_back(q);
    s.index_emitters();
    return s;
}

}  // namespace

TEST(LoadScene, CornellOccluderComposition) {
    const Scene s = load_scene("cornell-occluder");
    EXPECT_EQ(count_quads(s), 8);
    EXPECT_EQ(s.primitives.size() - std::size_t(count_quads(s)), 1u);
    EXPECT_EQ(s.emitters.size(), 1u);
    EXPECT_TRUE(s.camera_is_static());
}

TEST(LoadScene, AllBuiltinsLoadWithEmitters) {
    for (const auto& name : builtin_scene_names()) {
        const Scene s = load_scene(name);
        EXPECT_GE(s.emitters.size(), 1u) << name;
        for (const auto& p : s.primitives) EXPECT_LT(std::size_t(material_of(p)), s.materials.size());
    }
    const Scene g = load_scene("glossy-box");
    bool found = false;
    for (const auto& m : g.materials) found |= (m.kind == MaterialKind::Glossy && m.roughness == 0.2);
    EXPECT_TRUE(found);
}

TEST(LoadScene, MinimalDocumentParses) {
    const Scene s = load_scene_json(kMinimal);
    EXPECT_EQ(s.primitives.size(), 2u);
    ASSERT_EQ(s.emitters.size(), 1u);
    EXPECT_EQ(s.emitters[0], 1);
    EXPECT_EQ(s.camera[0].fov_deg, 45.0);
}

TEST(LoadScene, NoEmitterAndBlackBackgroundRejected) {
    const std::string doc = replace(kMinimal, R"("emission": [1, 1, 1])", R"("emission": [0, 0, 0])");
    EXPECT_THROW(load_scene_json(doc), ValidationError);
    const std::string lit = replace(doc, "\"camera\"", R"("background": [0.1, 0.1, 0.1], "camera")");
    EXPECT_NO_THROW(load_scene_json(lit));
}

TEST(LoadScene, ZeroFovRejected) {
    EXPECT_THROW(load_scene_json(replace(kMinimal, "\"fov_deg\": 45", "\"fov_deg\": 0")), ValidationError);
    EXPECT_THROW(load_scene_json(replace(kMinimal, "\"fov_deg\": 45", "\"fov_deg\": 179")), ValidationError);
}

TEST(LoadScene, UpParallelToViewRejected) {
    EXPECT_THROW(load_scene_json(replace(kMinimal, R"("up": [0, 1, 0])", R"("up": [0, 0, -2])")), ValidationError);
}

TEST(LoadScene, UnknownFieldNamesEntity) {
    try {
        load_scene_json(replace(kMinimal, R"("name": "grey",)", R"("name": "grey", "shininess": 3,)"));
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("shininess"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("materials[0]"), std::string::npos);
    }
}

TEST(LoadScene, BadMaterialReferenceRejected) {
    EXPECT_THROW(load_scene_json(replace(kMinimal, "\"material\": 1", "\"material\": 7")), ValidationError);
    EXPECT_THROW(load_scene_json(replace(kMinimal, "\"material\": \"grey\"", "\"material\": \"gray\"")),
                 ValidationError);
}

TEST(LoadScene, OutOfRangeMaterialValuesRejected) {
    EXPECT_THROW(load_scene_json(replace(kMinimal, "[0.5, 0.5, 0.5]", "[1.5, 0.5, 0.5]")), ValidationError);
    EXPECT_THROW(load_scene_json(replace(kMinimal, "[1, 1, 1]", "[1, -1, 1]")), ValidationError);
}

TEST(LoadScene, ParseErrorReportsLine) {
    const std::string broken = replace(kMinimal, R"("kind": "diffuse", "albedo")", R"("kind": "diffuse" "albedo")");
    try {
        load_scene_json(broken);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(LoadScene, MissingFileIsIoError) { EXPECT_THROW(load_scene("/nonexistent/scene.json"), IoError); }

TEST(Intersect, UnitSphereFromFront) {
    Scene s;
    s.materials.push_back(diffuse(0.5));
    s.primitives.push_back(Sphere{{0, 0, 0}, 1.0, 0});
    const auto h = intersect(s, Ray{{0, 0, -2}, {0, 0, 1}});
    ASSERT_TRUE(h);
    EXPECT_NEAR(h->t, 1.0, 1e-12);
    EXPECT_NEAR(h->pos.z, -1.0, 1e-12);
    EXPECT_NEAR(h->normal.z, -1.0, 1e-12);
    EXPECT_TRUE(h->front_face);
    EXPECT_FALSE(h->is_emitter);
}

TEST(Intersect, InsideSphereNormalFacesRay) {
    Scene s;
    s.materials.push_back(diffuse(0.5));
    s.primitives.push_back(Sphere{{0, 0, 0}, 1.0, 0});
    const auto h = intersect(s, Ray{{0, 0, 0}, {1, 0, 0}});
    ASSERT_TRUE(h);
    EXPECT_NEAR(h->t, 1.0, 1e-12);
    EXPECT_NEAR(h->normal.x, -1.0, 1e-12);
    EXPECT_FALSE(h->front_face);
}

TEST(Intersect, RayParallelToQuadMisses) {
    Scene s;
    s.materials.push_back(diffuse(0.5));
    s.primitives.push_back(Quad{{-1, 0, -1}, {0, 0, 2}, {2, 0, 0}, 0});
    EXPECT_FALSE(intersect(s, Ray{{-2, 0, 0}, {1, 0, 0}}));
    EXPECT_FALSE(intersect(s, Ray{{-2, 0.5, 0}, {1, 0, 0}}));
}

TEST(Intersect, TMaxCutoffBeforeSurface) {
    Scene s;
    s.materials.push_back(diffuse(0.5));
    s.primitives.push_back(Sphere{{0, 0, 0}, 1.0, 0});
    EXPECT_FALSE(intersect(s, Ray{{0, 0, -2}, {0, 0, 1}, 1e-4, 0.99}));
    EXPECT_TRUE(intersect(s, Ray{{0, 0, -2}, {0, 0, 1}, 1e-4, 1.01}));
}

TEST(Intersect, ShadowVisibility) {
    Scene s;
    s.materials.push_back(diffuse(0.5));
    s.primitives.push_back(Sphere{{0, 0, 0}, 1.0, 0});
    EXPECT_FALSE(visible(s, {0, 0, -3}, {0, 0, 3}));
    EXPECT_TRUE(visible(s, {2, 0, -3}, {2, 0, 3}));
    // Endpoints lying on surfaces do not self-occlude.
    EXPECT_TRUE(visible(s, {0, 0, -1}, {0, 0, -3}));
}

TEST(IntersectProperty, NearestHitMatchesBruteForce) {
    const Scene s = load_scene("cornell-occluder");
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.2, 2.2);
    std::normal_distribution<double> g;
    int hits = 0;
    for (int i = 0; i < 10000; ++i) {
        const Ray r{{u(rng) * 0.8, u(rng), u(rng)}, normalize(Vec3{g(rng), g(rng), g(rng)})};
        double best = std::numeric_limits<double>::infinity();
        int best_i = -1;
        for (std::size_t p = 0; p < s.primitives.size(); ++p) {
            const auto t = detail::intersect_primitive(s.primitives[p], r);
            if (t && *t < best) best = *t, best_i = int(p);
        }
        const auto h = intersect(s, r);
        ASSERT_EQ(h.has_value(), best_i >= 0);
        if (!h) continue;
        ++hits;
        EXPECT_EQ(h->primitive, best_i);
        EXPECT_DOUBLE_EQ(h->t, best);
        EXPECT_NEAR(length(h->normal), 1.0, 1e-9);
        EXPECT_LE(dot(h->normal, r.dir), 0.0);
    }
    EXPECT_GT(hits, 3000);
}

TEST(BrdfEval, DiffuseIsAlbedoOverPi) {
    const Material m = diffuse(0.5);
    const Vec3 n{0, 0, 1};
    const Rgb f = brdf_eval(m, normalize(Vec3{0.3, 0.1, 0.9}), normalize(Vec3{-0.5, 0.2, 0.4}), n);
    EXPECT_NEAR(f.x, 0.1591549, 1e-7);
    EXPECT_NEAR(f.y, 0.1591549, 1e-7);
    EXPECT_NEAR(f.z, 0.1591549, 1e-7);
}

TEST(BrdfEval, BelowHemisphereIsBlack) {
    const Vec3 n{0, 1, 0};
    for (const Material& m : {diffuse(0.7), glossy(0.3)}) {
        EXPECT_TRUE(is_black(brdf_eval(m, {0, -0.5, 0.866}, {0, 1, 0}, n)));
        EXPECT_TRUE(is_black(brdf_eval(m, {0, 1, 0}, {0.6, -0.8, 0}, n)));
    }
}

TEST(BrdfEval, GgxWhiteFurnaceBound) {
    const Material m = glossy(0.5, 1.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double theta_o : {0.0, 30.0, 60.0, 80.0}) {
        const double th = theta_o * kPi / 180.0;
        const Vec3 wo{std::sin(th), 0, std::cos(th)};
        const int n = 400000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const Vec3 wi = test::uniform_hemisphere(u(rng), u(rng));
            sum += detail::eval_local(m, wi, wo).x * wi.z * kTwoPi;
        }
        const double albedo = sum / n;
        EXPECT_LE(albedo, 1.03) << "theta_o " << theta_o;
        EXPECT_GT(albedo, 0.5) << "theta_o " << theta_o;
    }
}

TEST(BrdfEval, ReciprocityBothKinds) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g;
    for (const Material& m : {diffuse(0.6), glossy(0.3), glossy(0.05), glossy(1.0)}) {
        for (int i = 0; i < 5000; ++i) {
            const Vec3 n = normalize(Vec3{g(rng), g(rng), g(rng)});
            const TangentFrame f = build_tangent_frame(n);
            const Vec3 a = f.to_world(test::uniform_hemisphere(u(rng), u(rng)));
            const Vec3 b = f.to_world(test::uniform_hemisphere(u(rng), u(rng)));
            const Rgb fab = brdf_eval(m, a, b, n), fba = brdf_eval(m, b, a, n);
            for (int c = 0; c < 3; ++c) {
                ASSERT_TRUE(std::isfinite(fab[c]));
                ASSERT_GE(fab[c], 0.0);
                EXPECT_NEAR(fab[c], fba[c], 1e-6 * std::max(1.0, fab[c]));
            }
        }
    }
}

TEST(BrdfPdf, DiffuseClosedForms) {
    const Material m = diffuse(0.5);
    const Vec3 n{0, 0, 1}, wo{0, 0, 1};
    EXPECT_NEAR(brdf_pdf(m, {0, 0, 1}, wo, n), 1.0 / kPi, 1e-12);
    const double th = kPi / 3.0;
    EXPECT_NEAR(brdf_pdf(m, {std::sin(th), 0, std::cos(th)}, wo, n), 0.159155, 1e-6);
    EXPECT_EQ(brdf_pdf(m, {0, 0.6, -0.8}, wo, n), 0.0);
    EXPECT_EQ(brdf_pdf(glossy(0.3), {0, 0.6, -0.8}, wo, n), 0.0);
}

namespace {

/// Hemisphere integral of pdf_local by midpoint quadrature in (z, phi).
double pdf_mass(const Material& m, const Vec3& wo, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double z = (i + 0.5) / n, phi = (j + 0.5) / n * kTwoPi, r = std::sqrt(1.0 - z * z);
            acc += detail::pdf_local(m, {r * std::cos(phi), r * std::sin(phi), z}, wo);
        }
    return acc * (1.0 / n) * (kTwoPi / n);
}

Vec3 outgoing(double theta_deg) {
    const double th = theta_deg * kPi / 180.0;
    return {std::sin(th), 0, std::cos(th)};
}

}  // namespace

TEST(BrdfPdf, NormalizesOverHemisphere) {
    for (const Material& m : {diffuse(0.5), glossy(0.3)})
        for (double theta_o : {0.0, 20.0, 45.0})
            EXPECT_NEAR(pdf_mass(m, outgoing(theta_o), 2000), 1.0, 0.01) << "theta_o " << theta_o;
}

TEST(BrdfPdf, GlossyMassEqualsSamplerAcceptance) {
    // Visible-normal sampling reflects some half-vectors below the horizon;
    // those samples are rejected, and the pdf integrates to exactly the
    // accepted fraction.
    const Material m = glossy(0.3);
    Sampler rng(16);
    for (double theta_o : {0.0, 60.0, 80.0}) {
        const Vec3 wo = outgoing(theta_o);
        const int n = 1000000;
        int ok = 0;
        for (int i = 0; i < n; ++i) ok += detail::sample_local(m, wo, rng).has_value() ? 1 : 0;
        const double p = double(ok) / n;
        EXPECT_NEAR(pdf_mass(m, wo, 2000), p, 4.0 * std::sqrt(p * (1 - p) / n) + 2e-4) << "theta_o " << theta_o;
    }
}

TEST(BrdfSample, ReportedPdfMatchesBrdfPdf) {
    std::normal_distribution<double> g;
    std::mt19937_64 dirs(8);
    Sampler rng(8);
    for (const Material& m : {diffuse(0.5), glossy(0.3), glossy(0.05)}) {
        for (int i = 0; i < 20000; ++i) {
            const Vec3 n = normalize(Vec3{g(dirs), g(dirs), g(dirs)});
            Vec3 wo = normalize(Vec3{g(dirs), g(dirs), g(dirs)});
            if (dot(wo, n) < 0) wo = -wo;
            const auto s = brdf_sample(m, wo, n, rng);
            if (!s) continue;
            EXPECT_GT(dot(s->wi, n), 0.0);
            EXPECT_NEAR(s->pdf, brdf_pdf(m, s->wi, wo, n), 1e-6 * s->pdf);
        }
    }
}

TEST(BrdfSample, DiffuseThetaHistogramChiSquare) {
    // theta in [0, pi/2) split into 50 bins; the expected mass of a bin is
    // sin^2(theta1) - sin^2(theta0).
    const Material m = diffuse(0.5);
    Sampler rng(10);
    const int n = 1000000, bins = 50;
    std::vector<double> obs(bins, 0.0), exp(bins, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto s = brdf_sample(m, {0, 0, 1}, {0, 0, 1}, rng);
        ASSERT_TRUE(s);
        const double theta = std::acos(std::clamp(s->wi.z, -1.0, 1.0));
        obs[std::min(bins - 1, int(theta / (kPi / 2) * bins))] += 1.0;
    }
    for (int b = 0; b < bins; ++b) {
        const double t0 = b * (kPi / 2) / bins, t1 = (b + 1) * (kPi / 2) / bins;
        exp[b] = n * (std::pow(std::sin(t1), 2) - std::pow(std::sin(t0), 2));
    }
    int dof = 0;
    const double stat = test::chi2_statistic(obs, exp, &dof);
    EXPECT_LT(stat, test::chi2_critical(dof, 0.001));
}

TEST(BrdfSample, GlossyHistogramMatchesPdf) {
    const Material m = glossy(0.4);
    const double th = 40.0 * kPi / 180.0;
    const Vec3 wo{std::sin(th), 0, std::cos(th)};
    Sampler rng(12);
    const int n = 500000;
    int accepted = 0;
    std::vector<double> obs(64, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto wi = detail::sample_local(m, wo, rng);
        if (!wi) continue;
        ++accepted;
        obs[test::hemisphere_bin(*wi, 8, 8)] += 1.0;
    }
    // Expected counts by midpoint quadrature in (z, phi); conditioned on the
    // sample landing above the horizon.
    std::vector<double> prob(64, 0.0);
    const int sub = 64;
    double total = 0.0;
    for (int zb = 0; zb < 8; ++zb)
        for (int pb = 0; pb < 8; ++pb) {
            double acc = 0.0;
            for (int i = 0; i < sub; ++i)
                for (int j = 0; j < sub; ++j) {
                    const double z = (zb + (i + 0.5) / sub) / 8.0;
                    const double phi = (pb + (j + 0.5) / sub) / 8.0 * kTwoPi;
                    const double r = std::sqrt(1.0 - z * z);
                    acc += detail::pdf_local(m, {r * std::cos(phi), r * std::sin(phi), z}, wo);
                }
            prob[zb * 8 + pb] = acc * (1.0 / 8.0) * (kTwoPi / 8.0) / (sub * sub);
            total += prob[zb * 8 + pb];
        }
    std::vector<double> exp(64);
    for (int b = 0; b < 64; ++b) exp[b] = prob[b] / total * accepted;
    int dof = 0;
    const double stat = test::chi2_statistic(obs, exp, &dof);
    EXPECT_LT(stat, test::chi2_critical(dof, 0.001));
}

TEST(BrdfSample, LowRoughnessConcentratesAroundMirror) {
    const Material m = glossy(0.05);
    std::normal_distribution<double> g;
    std::mt19937_64 dirs(14);
    Sampler rng(14);
    for (int trial = 0; trial < 5; ++trial) {
        const Vec3 n = normalize(Vec3{g(dirs), g(dirs), g(dirs)});
        const TangentFrame f = build_tangent_frame(n);
        const double th = (10.0 + 15.0 * trial) * kPi / 180.0;
        const Vec3 wo = f.to_world({std::sin(th), 0, std::cos(th)});
        const Vec3 mirror = n * (2.0 * dot(wo, n)) - wo;
        int total = 0, near = 0;
        for (int i = 0; i < 100000; ++i) {
            const auto s = brdf_sample(m, wo, n, rng);
            if (!s) continue;
            ++total;
            near += angle_between(s->wi, mirror) <= 10.0 * kPi / 180.0;
        }
        EXPECT_GE(double(near) / total, 0.99) << "theta_o " << 10 + 15 * trial;
    }
}

TEST(SampleEmitter, QuadCenterOnAxis) {
    const Scene s = single_quad_emitter({0, 0, 1});
    for (double d : {0.5, 1.0, 3.0}) {
        const EmitterSample e = emitter_sample_at(s, {0, 0, d}, 0, 0.5, 0.5);
        EXPECT_NEAR(e.pdf_sr, d * d, 1e-12);
        EXPECT_NEAR(e.dist, d, 1e-12);
        EXPECT_NEAR(e.dir.z, -1.0, 1e-12);
        EXPECT_EQ(e.radiance, Rgb(2, 3, 4));
    }
}

TEST(SampleEmitter, BackSideIsBlack) {
    const Scene s = single_quad_emitter({0, 0, -1});
    Sampler rng(1);
    for (int i = 0; i < 100; ++i) {
        const EmitterSample e = sample_emitter(s, {0.1, -0.2, 1.0}, rng);
        EXPECT_TRUE(is_black(e.radiance));
        EXPECT_EQ(e.pdf_sr, 0.0);
    }
}

TEST(SampleEmitter, TwoEmittersChosenEqually) {
    Scene s = single_quad_emitter({0, 0, 1});
    s.primitives.push_back(Quad{{-0.5, -0.5, 2}, {0, 1, 0}, {1, 0, 0}, 0});
    s.index_emitters();
    ASSERT_EQ(s.emitters.size(), 2u);
    Sampler rng(3);
    const int n = 100000;
    int lower = 0;
    for (int i = 0; i < n; ++i) lower += sample_emitter(s, {0, 0, 1}, rng).point.z < 1.0;
    EXPECT_NEAR(double(lower) / n, 0.5, 0.01);
}

TEST(SampleEmitter, SolidAnglePdfIntegratesAcrossQuad) {
    // E[1/pdf] over emitter samples equals the subtended solid angle, which
    // for a unit square seen on-axis from distance 1 is 4 asin(1/5).
    const Scene s = single_quad_emitter({0, 0, 1});
    Sampler rng(5);
    const int n = 400000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += 1.0 / sample_emitter(s, {0, 0, 1}, rng).pdf_sr;
    EXPECT_NEAR(acc / n, 4.0 * std::asin(0.2), 5e-3);
}

TEST(Camera, PrimaryRayThroughCenterPixelLooksForward) {
    CameraKeyframe k;
    k.origin = {0, 0, 5};
    k.look_at = {0, 0, 0};
    k.fov_deg = 90;
    const Camera cam(k);
    const Ray r = cam.primary_ray(1, 1, 3, 3);
    EXPECT_NEAR(r.dir.z, -1.0, 1e-12);
    const auto p = cam.project({1, -1, 0}, 3, 3);
    ASSERT_TRUE(p);
    // tan(45deg) = 1: (1,-1) at depth 5 lands 0.2 of the half-width right/down.
    EXPECT_NEAR(p->px, (0.2 + 1.0) * 1.5 - 0.5, 1e-12);
    EXPECT_NEAR(p->py, (1.0 + 0.2) * 1.5 - 0.5, 1e-12);
    EXPECT_NEAR(p->depth, 5.0, 1e-12);
    EXPECT_FALSE(cam.project({0, 0, 6}, 3, 3));
}

TEST(Camera, ProjectInvertsPrimaryRay) {
    const Scene s = load_scene("cornell-occluder");
    const Camera cam = s.camera_at(0);
    for (int y = 0; y < 17; y += 3)
        for (int x = 0; x < 23; x += 4) {
            const Ray r = cam.primary_ray(x, y, 23, 17);
            const auto p = cam.project(r.origin + r.dir * 2.5, 23, 17);
            ASSERT_TRUE(p);
            EXPECT_NEAR(p->px, x, 1e-9);
            EXPECT_NEAR(p->py, y, 1e-9);
        }
}

TEST(Camera, KeyframeInterpolation) {
    Scene s;
    CameraKeyframe a, b;
    a.frame = 0;
    a.origin = {0, 0, 1};
    b.frame = 10;
    b.origin = {1, 0, 1};
    s.camera = {a, b};
    EXPECT_NEAR(s.keyframe_at(5).origin.x, 0.5, 1e-12);
    EXPECT_EQ(s.keyframe_at(-3).origin.x, 0.0);
    EXPECT_EQ(s.keyframe_at(30).origin.x, 1.0);
    EXPECT_FALSE(s.camera_is_static());
}
