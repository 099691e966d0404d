import init, { curve, sweep, profile } from "./pkg/fingap_wasm.js";

const $ = (id) => document.getElementById(id);
const status = $("status");

function inputs() {
  const l = $("l").value.split(",").map((s) => parseInt(s.trim(), 10));
  if (l.length !== 4 || l.some(Number.isNaN)) throw new Error("l needs four integers");
  return [...l, parseFloat($("tre").value), parseFloat($("tim").value)];
}

function guard(f) {
  return () => {
    status.textContent = "";
    status.className = "";
    try {
      f();
    } catch (e) {
      status.textContent = String(e.message || e);
      status.className = "err";
    }
  };
}

function fmt(z) {
  const [re, im] = z;
  return `${re.toPrecision(10)} ${im < 0 ? "-" : "+"} ${Math.abs(im).toPrecision(10)}i`;
}

function plot(canvas, xs, series, yRange, shade) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const [x0, x1] = [xs[0], xs[xs.length - 1]];
  const [y0, y1] = yRange;
  const px = (x) => ((x - x0) / (x1 - x0)) * w;
  const py = (y) => h - ((y - y0) / (y1 - y0)) * h;
  if (shade) {
    ctx.fillStyle = "#eee";
    ctx.fillRect(0, py(shade[1]), w, py(shade[0]) - py(shade[1]));
  }
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(0, py(0));
  ctx.lineTo(w, py(0));
  ctx.stroke();
  for (const [ys, colour] of series) {
    ctx.strokeStyle = colour;
    ctx.beginPath();
    let pen = false;
    ys.forEach((y, k) => {
      if (y === null || !Number.isFinite(y)) {
        pen = false;
        return;
      }
      const v = Math.max(y0, Math.min(y1, y));
      pen ? ctx.lineTo(px(xs[k]), py(v)) : ctx.moveTo(px(xs[k]), py(v));
      pen = true;
    });
    ctx.stroke();
  }
}

function showCurve() {
  const c = JSON.parse(curve(...inputs()));
  const lines = [
    `genus ${c.genus}`,
    "roots of Q:",
    ...c.roots.map((z) => "  " + fmt(z)),
    "Q coefficients (ascending):",
    ...c.q.map((z) => "  " + fmt(z)),
    "Q1 coefficients (ascending):",
    ...c.q1.map((z) => "  " + fmt(z)),
  ];
  $("curve-out").textContent = lines.join("\n");
}

function showSweep() {
  const s = JSON.parse(sweep(...inputs(), parseFloat($("emin").value), parseFloat($("emax").value), parseInt($("n").value, 10)));
  plot($("sweep"), s.e, [[s.trace_re, "#1f5fbf"]], [-4, 4], [-2, 2]);
}

function showProfile() {
  const p = JSON.parse(profile(...inputs(), parseFloat($("yf").value), 600));
  const vals = [...p.re, ...p.im].filter((v) => v !== null && Number.isFinite(v)).sort((a, b) => a - b);
  // clip the extreme tenth so that poles do not flatten the plot
  const lo = vals[Math.floor(vals.length * 0.05)] ?? -1;
  const hi = vals[Math.floor(vals.length * 0.95)] ?? 1;
  const pad = 0.1 * (hi - lo || 1);
  plot($("profile"), p.x, [[p.re, "#1f5fbf"], [p.im, "#d9822b"]], [lo - pad, hi + pad]);
}

await init();
$("go-curve").onclick = guard(showCurve);
$("go-sweep").onclick = guard(showSweep);
$("go-profile").onclick = guard(showProfile);
guard(showCurve)();
guard(showSweep)();
guard(showProfile)();
