#!/usr/bin/env python3
"""Writes the mock archive manifest and its files under data/fixtures.

Every image is lossless (PNG or GIF) so pixel features are exact. Run from
anywhere; output is deterministic.
"""
import io
import json
import pathlib

import numpy as np
from PIL import Image

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures"

UKWA = "www.webarchive.org.uk"
AIT = "wayback.archive-it.org"
GENERIC = "web.archive.example"

BLAST_DT = "20090522221251"
BLAST_R = "http://blasttheory.co.uk/"

files = {}  # relative path -> bytes
manifest = {"hosts": {}, "captures": [], "faults": []}


def put(rel, data):
    if isinstance(data, str):
        data = data.encode("utf-8")
    files[rel] = data
    return rel


def png(arr):
    buf = io.BytesIO()
    Image.fromarray(arr.astype(np.uint8), "RGB").save(buf, format="PNG")
    return buf.getvalue()


def gif(arr):
    buf = io.BytesIO()
    img = Image.fromarray(arr.astype(np.uint8), "RGB")
    img.quantize(colors=256, method=Image.Quantize.MEDIANCUT, dither=Image.Dither.NONE).save(buf, format="GIF")
    return buf.getvalue()


def features(arr):
    pix = arr.reshape(-1, 3)
    used = sum(len(np.unique(pix[:, ch])) for ch in range(3))
    colors = len(np.unique(pix[:, 0].astype(np.uint32) << 16 | pix[:, 1].astype(np.uint32) << 8 | pix[:, 2]))
    h, w = arr.shape[:2]
    return {"s": w * h, "r": w / h, "h": 768 - used, "c": colors}


def score(f, n, N):
    return 0.1 * (N - n) + 0.4 * f["s"] - 10 * f["h"] - 0.5 * f["r"] + 10 * f["c"]


def capture(host, uri_r, dt, rel, content_type=None, collection=None):
    c = {"host": host, "uri_r": uri_r, "datetime": dt, "file": rel}
    if content_type:
        c["content_type"] = content_type
    if collection:
        c["collection"] = collection
    manifest["captures"].append(c)


def favicon(seed, size=16):
    rng = np.random.default_rng(seed)
    base = rng.integers(0, 256, 3)
    arr = np.zeros((size, size, 3), np.uint8)
    arr[:, :] = base
    arr[4:12, 4:12] = 255 - base
    return png(arr)


def photo(seed, w, h):
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:h, 0:w]
    arr = np.stack([x * 255 / w, y * 255 / h, (x + y) * 127 / (w + h) + 64], axis=-1)
    arr = arr + rng.integers(-24, 25, (h, w, 3))
    return np.clip(arr, 0, 255).astype(np.uint8)


def exact_icon(w, h, colors, blank):
    """w x h image with exactly `colors` distinct RGB triples and `blank` empty histogram columns."""
    used = 768 - blank
    per = [used // 3, used // 3, used - 2 * (used // 3)]
    vals = [np.linspace(0, 255, k).round().astype(int) for k in per]
    assert all(len(set(v)) == k for v, k in zip(vals, per))
    triples, seen, t = [], set(), 0
    while len(triples) < colors:
        tri = (vals[0][t % per[0]], vals[1][(t // per[0] + t) % per[1]], vals[2][(t * 7 + t // per[1]) % per[2]])
        if tri not in seen:
            seen.add(tri)
            triples.append(tri)
        t += 1
    # Cover every channel value at least once.
    for ch in range(3):
        assert {tri[ch] for tri in triples} == set(vals[ch])
    pix = [triples[i % colors] for i in range(w * h)]
    arr = np.array(pix, np.uint8).reshape(h, w, 3)
    f = features(arr)
    assert f["c"] == colors and f["h"] == blank, f
    return arr


# ---------------------------------------------------------------- archives
manifest["hosts"][UKWA] = {
    "archive": {"scheme": "https", "prefix": "/wayback/archive/",
                "timegate_prefix": "/wayback/archive/timegate/", "timemap_prefix": "/wayback/archive/timemap/link/"},
    "files": {
        "/": {"file": put("ukwa/home.html", "<!DOCTYPE html><html><head><title>UK Web Archive</title>"
                          "<link rel=\"shortcut icon\" href=\"/static/ukwa.png\"></head>"
                          "<body><h1>UK Web Archive</h1></body></html>")},
        "/static/ukwa.png": {"file": put("ukwa/ukwa.png", favicon(1))},
    },
}
manifest["hosts"][AIT] = {
    "archive": {"prefix": "/{collection}/"},
    "files": {"/favicon.ico": {"file": put("archiveit/favicon.png", favicon(2)), "content_type": "image/png"}},
}
manifest["hosts"][GENERIC] = {
    "archive": {},
    "files": {"/favicon.ico": {"file": put("generic/favicon.png", favicon(3)), "content_type": "image/png"}},
}
manifest["hosts"]["archive-it.org"] = {"files": {}}
manifest["hosts"]["live.example"] = {"files": {
    "/": {"file": put("live/index.html", "<html><head><title>Live</title></head>"
                      "<body><p>A live page that is not a memento at all.</p></body></html>")}}}
manifest["hosts"]["occupyarrests.wordpress.com"] = {"files": {
    "/": {"file": put("live/occupyarrests.html", "<html><head><title>Occupy Arrests</title></head>"
                      "<body><p>Still online today with a running tally.</p></body></html>")}}}

# ------------------------------------------------------------ blast theory
nav = ["bt_logo", "latest", "about", "home", "recent", "types", "chrono"]
nav_sizes = [(200, 80), (180, 40), (160, 40), (140, 40), (120, 40), (100, 40), (80, 40)]
ranked_jpg = ["dotf/Untitled-1", "yougetme/ygm_icon", "cysmn/cy_icon", "rider_spoke/rs_icon",
              "ulrikeandeamon/ulrikeandeamon_small", "trucold/trucold_icon"]
jpg_sizes = [(400, 300), (380, 280), (360, 260), (340, 240), (320, 220), (300, 200)]
nav_palette = np.array([[0, 0, 0], [255, 255, 255], [204, 0, 51], [102, 102, 102]], np.uint8)

page_order = ([f"bt/pe/{n}.gif" for n in nav] + [f"bt/i/{j}.jpg" for j in ranked_jpg[:4]] +
              ["bt/i/uncleroy/ur_icon.jpg"] + [f"bt/i/{j}.jpg" for j in ranked_jpg[4:]])
assert page_order.index("bt/i/uncleroy/ur_icon.jpg") == 11

images = {}
for i, (n, (w, h)) in enumerate(zip(nav, nav_sizes)):
    idx = (np.arange(w * h).reshape(h, w) // (w // 4 + 1) + np.arange(h)[:, None]) % 4
    images[f"bt/pe/{n}.gif"] = nav_palette[idx]
for i, (j, (w, h)) in enumerate(zip(ranked_jpg, jpg_sizes)):
    images[f"bt/i/{j}.jpg"] = photo(100 + i, w, h)
images["bt/i/uncleroy/ur_icon.jpg"] = exact_icon(168, 96, 4776, 463)

N = len(page_order)
scores = {}
for n, path in enumerate(page_order):
    arr = images[path]
    if path.endswith(".gif"):
        data = gif(arr)
        ctype = "image/gif"
        arr = np.array(Image.open(io.BytesIO(data)).convert("RGB"))
    else:
        data = png(arr)
        ctype = "image/png"
    scores[path] = score(features(arr), n, N)
    capture(UKWA, BLAST_R + path, BLAST_DT, put("blast/" + path.replace("/", "_"), data), ctype)

expected_rank = [f"bt/i/{j}.jpg" for j in ranked_jpg[:6]]
expected_rank.insert(6, "bt/i/uncleroy/ur_icon.jpg")
expected_rank += [f"bt/pe/{n}.gif" for n in nav]
got_rank = sorted(page_order, key=lambda p: -scores[p])
assert got_rank == expected_rank, got_rank
assert abs(scores["bt/i/uncleroy/ur_icon.jpg"] - 49580.625) < 1e-9

blast_html = f"""<!DOCTYPE html>
<html>
<head>
<title>Blast Theory</title>
<meta http-equiv="Content-Type" content="text/html; charset=utf-8">
<link rel="stylesheet" href="bt/css/main.css">
</head>
<body>
<div id="header">
<a href="/"><img src="bt/pe/bt_logo.gif" alt="Blast Theory"></a>
<ul class="menu">
<li><a href="bt/latest.html"><img src="bt/pe/latest.gif" alt="latest"></a></li>
<li><a href="bt/about.html"><img src="bt/pe/about.gif" alt="about"></a></li>
<li><a href="/"><img src="bt/pe/home.gif" alt="home"></a></li>
<li><a href="bt/recent.html"><img src="bt/pe/recent.gif" alt="recent"></a></li>
<li><a href="bt/types.html"><img src="bt/pe/types.gif" alt="types"></a></li>
<li><a href="bt/chrono.html"><img src="bt/pe/chrono.gif" alt="chrono"></a></li>
</ul>
</div>
<div id="news">
<h2>Sam Pearson and Clara Garcia Fraile are in residence for one month</h2>
<p>Sam Pearson and Clara Garcia Fraile are in residence for one month working on a new project called In My Shoes.
They are developing a piece about memory, family and the stories people carry with them, using headphones, video and a shared walk through the neighbourhood around the studio.
Visitors to the studio in Portslade can drop in on Friday afternoons to see the work in progress.</p>
<h3>Rider Spoke tours to Adelaide</h3>
<p>Rider Spoke, our work for cyclists, travels to the Adelaide Festival this spring.
Participants cycle through the city at night, finding hiding places and recording messages for others to discover later.
Bikes, helmets and lights are provided, and each ride lasts around one hour.</p>
<h3>Ulrike and Eamon Compliant at the Venice Biennale</h3>
<p>Ulrike and Eamon Compliant was commissioned for the Venice Biennale and invites you to step into the shoes of a political activist.
A phone call guides each participant through the streets of the city, asking questions about conviction, violence and responsibility.
The work closes with a conversation in a quiet room.</p>
</div>
<div id="projects">
<a href="bt/dotf.html"><img src="bt/i/dotf/Untitled-1.jpg" alt=""></a>
<a href="bt/yougetme.html"><img src="bt/i/yougetme/ygm_icon.jpg" alt=""></a>
<a href="bt/cysmn.html"><img src="bt/i/cysmn/cy_icon.jpg" alt=""></a>
<a href="bt/rider_spoke.html"><img src="bt/i/rider_spoke/rs_icon.jpg" alt=""></a>
<a href="bt/uncleroy.html"><img src="bt/i/uncleroy/ur_icon.jpg" alt=""></a>
<a href="bt/ulrike.html"><img src="bt/i/ulrikeandeamon/ulrikeandeamon_small.jpg" alt=""></a>
<a href="bt/trucold.html"><img src="bt/i/trucold/trucold_icon.jpg" alt=""></a>
</div>
<div id="footer"><a href="bt/contact.html">Contact</a> <a href="bt/newsletter.html">Newsletter</a></div>
</body>
</html>
"""
capture(UKWA, BLAST_R, BLAST_DT, put("blast/index.html", blast_html))
# Earliest favicon capture is a few days later, so it is found by negotiation.
capture(UKWA, BLAST_R + "favicon.ico", "20090527101500", put("blast/favicon.png", favicon(4)), "image/png")

# -------------------------------------------------------------------- CNN
CNN_R = "http://news.blogs.cnn.com/category/world/egypt-world-latest-news/"
CNN_DT = "20110211072257"
sidebar = ["Most Popular Stories", "Weather Forecast Today", "Sports Scores Live", "Entertainment Gossip Column",
           "Travel Deals Weekly", "Technology Reviews Hub", "Health Tips Daily", "Personal Finance Basics"]
cnn_paragraphs = [
    "Crowds filled Tahrir Square in Cairo again on Friday as protesters demanded that President Hosni Mubarak "
    "leave office immediately. Many protesters said they would stay in the square until the president resigned.",
    "The protest movement entered its eighteenth day with marches in Alexandria, Suez and other Egyptian cities. "
    "Witnesses described the crowds in Cairo as the largest since the protests began.",
    "State television reported that the military council would issue an important statement. Protesters in "
    "Cairo chanted and waved flags while soldiers watched from tanks around the square.",
    "Egypt has been ruled by Mubarak for nearly thirty years. The protests in Egypt followed the uprising in "
    "Tunisia and drew support from young people across the region.",
    "Reporters in Cairo said the mood in the square changed through the day from anger to celebration as rumors "
    "spread that Mubarak would step down. Protesters said Egypt would not return to the old order.",
]
cnn_html = ["<!DOCTYPE html><html><head><title>Egypt | CNN World Latest News</title>",
            "<meta name=\"description\" content=\"Live coverage of the protests in Egypt from the CNN newsroom.\">",
            "<link rel=\"icon\" href=\"/favicon.ico\"></head><body>",
            "<div id=\"cnn_hdr\"><ul>" + "".join(f"<li><a href=\"/s{i}\">{t}</a></li>" for i, t in enumerate(sidebar[:4])) + "</ul></div>",
            "<div id=\"content\"><h1>Egypt World Latest News</h1>",
            "<img src=\"/images/tahrir.jpg\" width=\"400\" height=\"260\">"]
cnn_html += [f"<p>{p}</p>" for p in cnn_paragraphs]
cnn_html += ["</div><div class=\"sidebar\"><ul>" +
             "".join(f"<li><a href=\"/t{i}\">{t}</a></li>" for i, t in enumerate(sidebar[4:])) + "</ul></div>",
             "</body></html>"]
capture(AIT, CNN_R, CNN_DT, put("cnn/egypt.html", "\n".join(cnn_html)), collection="2358")
capture(AIT, "http://news.blogs.cnn.com/images/tahrir.jpg", CNN_DT, put("cnn/tahrir.png", png(photo(7, 400, 260))),
        "image/png", collection="2358")
capture(AIT, "http://news.blogs.cnn.com/favicon.ico", CNN_DT, put("cnn/favicon.png", favicon(5)), "image/png",
        collection="2358")
manifest["cnn_sidebar"] = sidebar

# ----------------------------------------------------------------- Occupy
NATION_R = "http://www.thenation.com/blog/167643/may-day-special-occupyusa-blog-may-1-frequent-updates/"
NATION_DT = "20120510205501"
ARRESTS_R = "http://occupyarrests.wordpress.com/"
ARRESTS_DT = "20120814042704"
nation_html = """<!DOCTYPE html><html><head>
<title>May Day Special: #OccupyUSA Blog for May 1 (Frequent Updates) | The Nation</title>
<meta property="og:description" content="Live updates from May Day actions across the United States, from Oakland to New York.">
<link rel="shortcut icon" href="/sites/all/themes/tnn/favicon.ico">
</head><body>
<nav><a href="/politics">Politics</a> <a href="/world">World</a> <a href="/books">Books</a></nav>
<article>
<h1>May Day Special: #OccupyUSA Blog for May 1</h1>
<img src="/sites/default/files/mayday_nyc.jpg" alt="May Day march in New York">
<p>Marchers gathered in Bryant Park in the morning before moving toward Union Square, where a large rally was held in the afternoon.</p>
<p>In Oakland the police used gas canisters near Oscar Grant Plaza, and organizers reported several arrests before noon.</p>
<img src="/sites/default/files/mayday_oakland.jpg" alt="Oakland">
<p>Thousands joined a evening march from Union Square to Wall Street, where the crowd remained peaceful as the sun went down.</p>
<img src="/sites/default/files/mayday_seattle.jpg" alt="Seattle">
</article>
</body></html>
"""
capture(AIT, NATION_R, NATION_DT, put("occupy/nation.html", nation_html), collection="2950")
for k, name in enumerate(["mayday_nyc", "mayday_oakland", "mayday_seattle"]):
    capture(AIT, f"http://www.thenation.com/sites/default/files/{name}.jpg", NATION_DT,
            put(f"occupy/{name}.png", png(photo(20 + k, 360 - 40 * k, 240))), "image/png", collection="2950")
capture(AIT, "http://www.thenation.com/sites/all/themes/tnn/favicon.ico", NATION_DT,
        put("occupy/nation_favicon.png", favicon(6)), "image/png", collection="2950")

arrests_html = """<!DOCTYPE html><html><head>
<title>Occupy Arrests</title>
<meta name="description" content="A running total of arrests at Occupy protests across the United States.">
</head><body>
<h1>Occupy Arrests</h1>
<p>This site keeps a running total of the arrests made at Occupy protests since September 2011, with sources for each entry.</p>
<img src="http://occupyarrests.files.wordpress.com/2012/08/tally.png">
<p>The count passed seven thousand this month after arrests in New York, Chicago and Oakland.</p>
<img src="http://occupyarrests.files.wordpress.com/2012/08/map.png">
</body></html>
"""
capture(AIT, ARRESTS_R, ARRESTS_DT, put("occupy/arrests.html", arrests_html), collection="2950")
for k, name in enumerate(["tally", "map"]):
    capture(AIT, f"http://occupyarrests.files.wordpress.com/2012/08/{name}.png", ARRESTS_DT,
            put(f"occupy/{name}.png", png(photo(30 + k, 300, 200 + 20 * k))), "image/png", collection="2950")

collection_page = f"""<!DOCTYPE html><html><head>
<meta property="og:title" content="Occupy Movement 2011/2012">
<title>Occupy Movement 2011/2012 | Archive-It</title></head><body>
<h1>Occupy Movement 2011/2012</h1>
<div class="seed" data-uri="{NATION_R}"><h3>{NATION_R}</h3>
<dl><dt>Title</dt><dd>May Day Special #OccupyUSA Blog</dd><dt>Subject</dt><dd>Occupy movement</dd><dd>Protest movements</dd>
<dt>Language</dt><dd>English</dd></dl></div>
<div class="seed" data-uri="{ARRESTS_R}"><h3>{ARRESTS_R}</h3>
<dl><dt>Title</dt><dd>Occupy Arrests</dd><dt>Creator</dt><dd>Occupy Arrests</dd></dl></div>
</body></html>
"""
manifest["hosts"]["archive-it.org"]["files"]["/collections/2950"] = {
    "file": put("occupy/collection_2950.html", collection_page)}

# -------------------------------------------------- protocol fixtures
def simple_page(title, body):
    return f"<!DOCTYPE html><html><head><title>{title}</title></head><body>{body}</body></html>"


for dt in ["20090301120000", "20110615080000", "20150102030405"]:
    capture(GENERIC, "http://timeline.example/", dt,
            put(f"generic/timeline_{dt}.html", simple_page("Timeline " + dt[:4], f"<p>Captured in {dt[:4]} for the timeline.</p>")))
for dt in ["20110211000000", "20120510000000"]:
    capture(GENERIC, "http://gate.example/", dt,
            put(f"generic/gate_{dt}.html", simple_page("Gate " + dt[:4], "<p>Negotiation target page.</p>")))
for dt in ["20100101000000", "20100103000000"]:
    capture(GENERIC, "http://tie.example/", dt,
            put(f"generic/tie_{dt}.html", simple_page("Tie " + dt[:8], "<p>Equidistant captures for tie breaking.</p>")))

reel_body = ("<p>Two pictures and a caption for the short reel.</p>"
             "<img src=\"/one.png\"><p>The first picture shows a harbour at dawn.</p>"
             "<img src=\"/two.png\"><p>The second picture shows the same harbour at night.</p>")
capture(GENERIC, "http://reel.example/", "20140101000000", put("generic/reel.html", simple_page("Reel", reel_body)))
capture(GENERIC, "http://reel.example/one.png", "20140101000000", put("generic/one.png", png(photo(40, 256, 192))), "image/png")
capture(GENERIC, "http://reel.example/two.png", "20140101000000", put("generic/two.png", png(photo(41, 192, 256))), "image/png")

capture(GENERIC, "http://plain.example/", "20130101000000",
        put("generic/plain.html", simple_page("Plain", "<p>Nothing but words on this page, no pictures.</p>")))
meta_head = ("<!DOCTYPE html><html><head><title>Meta</title>"
             "<meta property=\"og:image\" content=\"http://web.archive.example/web/20130101000000im_/http://meta.example/card.png\"></head>"
             "<body><p>Declares its own card image.</p><img src=\"/other.png\"></body></html>")
capture(GENERIC, "http://meta.example/", "20130101000000", put("generic/meta.html", meta_head))
capture(GENERIC, "http://meta.example/card.png", "20130101000000", put("generic/card.png", png(photo(42, 300, 150))), "image/png")
capture(GENERIC, "http://meta.example/other.png", "20130101000000", put("generic/other.png", png(photo(43, 600, 600))), "image/png")
cloud = "<p>egypt egypt protest</p>"
capture(GENERIC, "http://cloud.example/", "20130101000000", put("generic/cloud.html", simple_page("Cloud", cloud)))

for name in ["slow", "reset", "broken"]:
    capture(GENERIC, f"http://{name}.example/", "20200101000000",
            put(f"generic/{name}.html", simple_page(name, "<p>Fault injection target page.</p>")))
manifest["faults"] = [
    {"host": GENERIC, "path_prefix": "/web/20200101000000/http://slow.example/", "delay_ms": 3000},
    {"host": GENERIC, "path_prefix": "/web/20200101000000/http://reset.example/", "reset": True},
    {"host": GENERIC, "path_prefix": "/web/20200101000000/http://broken.example/", "status": 503},
]

# ------------------------------------------------------------------ write
ROOT.mkdir(parents=True, exist_ok=True)
for rel, data in files.items():
    p = ROOT / rel
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_bytes(data)
(ROOT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")

story = ROOT.parent / "stories"
story.mkdir(exist_ok=True)
(story / "occupy.txt").write_text(
    f"http://{AIT}/2950/{NATION_DT}/{NATION_R}\nhttp://{AIT}/2950/{ARRESTS_DT}/{ARRESTS_R}\n")
(story / "occupy.json").write_text(json.dumps({
    "title": "My Story Title",
    "collection_url": "https://archive.example.com/mycollection",
    "generated_by": "My Curator",
    "metadata": {"myKey1": "value1", "my-Key2": "value2", "my key 3": "value 3"},
    "elements": [
        {"type": "text", "value": "Livestream from Oakland, gas canisters used, arrests reported."},
        {"type": "link", "value": f"http://{AIT}/2950/{NATION_DT}/{NATION_R}"},
        {"type": "text", "value": "Hundreds of arrests across the country today"},
        {"type": "link", "value": f"http://{AIT}/2950/{ARRESTS_DT}/{ARRESTS_R}"},
    ]}, indent=4) + "\n")
print(f"wrote {len(files)} files and {len(manifest['captures'])} captures to {ROOT}")
