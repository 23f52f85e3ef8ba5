import init, { d_curve, series_vs_closed, stopped_path } from "./pkg/expsig_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function report(el, f) {
  el.textContent = "";
  el.classList.remove("err");
  try {
    return f();
  } catch (e) {
    el.textContent = String(e);
    el.classList.add("err");
    return null;
  }
}

function plotD() {
  const pts = report($("d-msg"), () => JSON.parse(d_curve(num("d-lo"), num("d-hi"), num("d-n"), 128)));
  if (!pts) return;
  const cv = $("d-canvas"), g = cv.getContext("2d");
  g.clearRect(0, 0, cv.width, cv.height);
  const ys = pts.map((p) => p.mid).filter(Number.isFinite);
  const ymax = Math.max(...ys.map(Math.abs), 1e-12);
  const sx = (l) => ((l - pts[0].lambda) / (pts[pts.length - 1].lambda - pts[0].lambda)) * cv.width;
  const sy = (v) => cv.height / 2 - (v / ymax) * (cv.height / 2 - 10);
  g.strokeStyle = "#999";
  g.beginPath(); g.moveTo(0, sy(0)); g.lineTo(cv.width, sy(0)); g.stroke();
  g.strokeStyle = "#124";
  g.beginPath();
  pts.forEach((p, i) => (i ? g.lineTo(sx(p.lambda), sy(p.mid)) : g.moveTo(sx(p.lambda), sy(p.mid))));
  g.stroke();
  for (const p of pts) {
    if (p.sign === null) { g.fillStyle = "#c60"; g.fillRect(sx(p.lambda) - 2, sy(0) - 2, 4, 4); }
  }
  const flips = pts.filter((p, i) => i && p.sign !== null && pts[i - 1].sign !== null && p.sign !== pts[i - 1].sign);
  $("d-msg").textContent = flips.length
    ? "certified sign changes just below λ = " + flips.map((p) => p.lambda.toFixed(4)).join(", ")
    : "no certified sign change on this grid";
}

function compare() {
  const out = report($("s-msg"), () => JSON.parse(series_vs_closed($("s-lambda").value, num("s-levels"))));
  const t = $("s-table");
  t.innerHTML = "";
  if (!out) return;
  $("s-msg").textContent = `C(0) ∈ ${out.closed_form.mid} ± ${out.closed_form.rad.toExponential(2)}; pole in [${out.pole_bracket.map((x) => x.toFixed(5)).join(", ")}]`;
  t.insertAdjacentHTML("beforeend", "<tr><th>k</th><th>a_k</th><th>partial sum</th><th>|gap| ≤</th></tr>");
  for (const r of out.rows) {
    const tr = document.createElement("tr");
    for (const v of [r.k, r.a_k, r.partial_sum.toPrecision(17), r.gap.toExponential(2)]) {
      const td = document.createElement("td");
      td.textContent = v;
      tr.appendChild(td);
    }
    t.appendChild(tr);
  }
}

let pathIndex = 0;
function walk() {
  const out = report($("p-msg"), () =>
    JSON.parse(stopped_path(num("p-x"), num("p-y"), num("p-h"), num("p-seed"), pathIndex)));
  if (!out) return;
  const cv = $("p-canvas"), g = cv.getContext("2d"), c = cv.width / 2, s = c - 10;
  g.clearRect(0, 0, cv.width, cv.height);
  g.strokeStyle = "#999";
  g.beginPath(); g.arc(c, c, s, 0, 2 * Math.PI); g.stroke();
  g.strokeStyle = "#124";
  g.beginPath();
  out.points.forEach(([x, y], i) => (i ? g.lineTo(c + s * x, c - s * y) : g.moveTo(c + s * x, c - s * y)));
  g.stroke();
  $("p-msg").textContent = `path ${pathIndex}: ${out.steps} steps, τ ≈ ${out.exit_time.toFixed(4)}`;
}

await init();
$("d-go").onclick = plotD;
$("s-go").onclick = compare;
$("p-go").onclick = () => { pathIndex = 0; walk(); };
$("p-next").onclick = () => { pathIndex += 1; walk(); };
plotD();
