import io
import json
import os
from pathlib import Path

import pytest
from PIL import Image, ImageSequence

import mementokit as mk

DATA = Path(os.environ.get("MKIT_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))
BLAST = "https://www.webarchive.org.uk/wayback/archive/20090522221251/http://blasttheory.co.uk/"


@pytest.fixture(scope="module")
def service():
    return mk.MockService(str(DATA / "fixtures" / "manifest.json"), service_base="http://svc.test")


def png_bytes(img):
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def test_score_of_known_feature_vector():
    f = mk.ImageFeatures()
    f.N, f.n, f.s, f.h, f.r, f.c = 14, 11, 16128, 463, 1.75, 4776
    assert mk.score_image(f) == 49580.625


def test_features_match_pillow():
    img = Image.new("RGB", (48, 40))
    for x in range(48):
        for y in range(40):
            img.putpixel((x, y), (x * 5, y * 6, (x + y) % 7))
    f = mk.compute_image_features(png_bytes(img), 2, 5)
    assert (f.width, f.height) == (48, 40)
    assert f.s == 48 * 40
    assert f.r == pytest.approx(48 / 40)
    assert f.c == len(set(img.getdata()))
    assert f.h == img.histogram().count(0)


def test_weight_scaling_keeps_order():
    feats = []
    for size in [(40, 40), (64, 32), (100, 50)]:
        img = Image.effect_noise(size, 60).convert("RGB")
        feats.append(mk.compute_image_features(png_bytes(img), 1, 3))
    w = mk.ScoringWeights()
    w3 = mk.ScoringWeights(w.k1 * 3, w.k2 * 3, w.k3 * 3, w.k4 * 3, w.k5 * 3)
    order = sorted(range(3), key=lambda i: mk.score_image(feats[i], w))
    assert order == sorted(range(3), key=lambda i: mk.score_image(feats[i], w3))


def test_undecodable_image_raises():
    with pytest.raises(mk._core.Error):
        mk.compute_image_features(b"not an image")


def test_text_functions():
    html = (DATA / "fixtures" / "cnn" / "egypt.html").read_text()
    assert "Egypt" in mk.extract_title(html)
    assert len(mk.extract_description(html)) <= 200
    top = mk.word_frequencies(html)[:3]
    assert all(count >= 1 for _, count in top)
    assert mk.tokenize_words("Hello, World") == ["hello", "world"]
    ranked = mk.rank_sentences(html, "readability/textrank")
    assert [s.rank for s in ranked] == list(range(1, len(ranked) + 1))


def test_contentdata(service):
    r = service.get("/services/memento/contentdata/" + BLAST)
    assert r.status == 200
    assert json.loads(r.body)["title"] == "Blast Theory"


def test_unknown_endpoint_and_bad_uri(service):
    assert service.get("/services/memento/nothing/" + BLAST).status == 404
    assert service.get("/services/memento/contentdata/not a uri").status == 400


def test_imagereel_decodes_with_pillow(service):
    r = service.get("/services/product/imagereel/" + BLAST, {"Prefer": "imagecount=2"})
    assert r.status == 200
    assert r.content_type == "image/gif"
    gif = Image.open(io.BytesIO(r.body))
    assert gif.format == "GIF"
    assert sum(1 for _ in ImageSequence.Iterator(gif)) == 42


def test_thumbnail_prefer_applied(service):
    r = service.get(
        "/services/product/thumbnail/" + BLAST,
        {"Prefer": "viewport_width=4096,thumbnail_width=2048"},
    )
    assert r.status == 200
    applied = dict(p.split("=") for p in r.header("Preference-Applied").split(","))
    assert applied["thumbnail_height"] == "156"
    assert Image.open(io.BytesIO(r.body)).size == (2048, 156)
