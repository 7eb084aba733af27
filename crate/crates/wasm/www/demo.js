// Plain-canvas driver for the covertjam wasm demo. No framework; the wasm
// module returns JSON strings and this file draws them.

import init, { demo_geometry, demo_detection, demo_throughput } from "../pkg/covertjam_wasm.js";

const $ = (id) => document.getElementById(id);
const status = $("status");

const controls = {
  seed: $("seed"),
  n: $("n"),
  pj: $("pj"),
  tau: $("tau"),
  rmax: $("rmax"),
};

function values() {
  return {
    seed: Math.max(0, controls.seed.valueAsNumber | 0),
    n: controls.n.valueAsNumber,
    pj: controls.pj.valueAsNumber,
    tau: controls.tau.valueAsNumber,
    rmax: controls.rmax.valueAsNumber,
  };
}

function syncOutputs(v) {
  $("nOut").textContent = v.n;
  $("pjOut").textContent = v.pj;
  $("tauOut").textContent = v.tau.toFixed(1);
  $("rmaxOut").textContent = v.rmax;
}

function parse(json) {
  const data = JSON.parse(json);
  if (data.error) throw new Error(data.error);
  return data;
}

// ---------------------------------------------------------------- plotting

function clear(ctx) {
  ctx.save();
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  ctx.restore();
}

const M = { l: 52, r: 12, t: 10, b: 34 };

function frame(ctx, xLabel, yLabel) {
  const { width: w, height: h } = ctx.canvas;
  ctx.strokeStyle = "#99a2ac";
  ctx.lineWidth = 1;
  ctx.strokeRect(M.l, M.t, w - M.l - M.r, h - M.t - M.b);
  ctx.fillStyle = "#68727f";
  ctx.font = "12px system-ui";
  ctx.textAlign = "center";
  ctx.fillText(xLabel, M.l + (w - M.l - M.r) / 2, h - 8);
  ctx.save();
  ctx.translate(14, M.t + (h - M.t - M.b) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();
}

function makeScale(ctx, x0, x1, y0, y1) {
  const { width: w, height: h } = ctx.canvas;
  return {
    x: (x) => M.l + ((x - x0) / (x1 - x0)) * (w - M.l - M.r),
    y: (y) => h - M.b - ((y - y0) / (y1 - y0)) * (h - M.t - M.b),
  };
}

function polyline(ctx, s, xs, ys, color, width = 2) {
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  for (let i = 0; i < xs.length; i++) {
    const px = s.x(xs[i]);
    const py = s.y(ys[i]);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  }
  ctx.stroke();
}

function yTicks(ctx, s, x0, ticks, fmt) {
  ctx.fillStyle = "#68727f";
  ctx.font = "11px system-ui";
  ctx.textAlign = "right";
  for (const t of ticks) {
    ctx.fillText(fmt(t), M.l - 5, s.y(t) + 4);
    ctx.strokeStyle = "#e4e8ec";
    ctx.beginPath();
    ctx.moveTo(M.l, s.y(t));
    ctx.lineTo(s.x(x0), s.y(t));
    ctx.stroke();
  }
}

function legend(ctx, entries) {
  ctx.font = "12px system-ui";
  ctx.textAlign = "left";
  let y = M.t + 16;
  for (const [label, color] of entries) {
    ctx.fillStyle = color;
    ctx.fillRect(M.l + 10, y - 8, 18, 3);
    ctx.fillStyle = "#1c2430";
    ctx.fillText(label, M.l + 34, y - 2);
    y += 16;
  }
}

// ------------------------------------------------------------------ panels

function drawGeometry(v) {
  const data = parse(demo_geometry(v.seed, v.n, v.tau));
  const ctx = $("geo").getContext("2d");
  clear(ctx);
  const { width: w, height: h } = ctx.canvas;
  const r = data.disk_radius_m * 1.15;
  const scale = Math.min(w, h) / (2 * r);
  const cx = w / 2;
  const cy = h / 2;
  const px = (p) => [cx + p[0] * scale, cy - p[1] * scale];

  // Deployment disk.
  ctx.strokeStyle = "#d6dbe1";
  ctx.setLineDash([5, 4]);
  ctx.beginPath();
  ctx.arc(cx, cy, data.disk_radius_m * scale, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.setLineDash([]);

  // Helpers shaded by selection probability.
  data.helpers.forEach((hp, k) => {
    const [x, y] = px(hp);
    const p = data.selection_probs[k];
    ctx.fillStyle = `rgba(31,138,76,${0.15 + 0.85 * p})`;
    ctx.beginPath();
    ctx.arc(x, y, 7, 0, 2 * Math.PI);
    ctx.fill();
    ctx.strokeStyle = "#1f8a4c";
    ctx.stroke();
  });

  const mark = (pos, color, label) => {
    const [x, y] = px(pos);
    ctx.fillStyle = color;
    ctx.beginPath();
    ctx.arc(x, y, 8, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#1c2430";
    ctx.font = "bold 13px system-ui";
    ctx.textAlign = "center";
    ctx.fillText(label, x, y - 12);
  };
  mark(data.tx, "#2563a8", "T");
  mark(data.rx, "#1c2430", "R");
  mark(data.warden, "#b33", "W");

  const avg = data.selection_probs.length
    ? data.selection_probs.reduce((a, b) => a + b, 0) / data.selection_probs.length
    : 0;
  $("geoInfo").innerHTML =
    `mean selection probability <b>${avg.toFixed(3)}</b> · darker helpers jam more often`;
}

function drawDetection(v) {
  const data = parse(demo_detection(v.seed, v.n, v.pj, v.tau, 140));
  const ctx = $("det").getContext("2d");
  clear(ctx);

  const floor = data.sigma_w2_w;
  const xs = data.mu_w.map((mu) => Math.log10(mu - floor));
  const x0 = xs[0];
  const x1 = xs[xs.length - 1];
  const s = makeScale(ctx, x0, x1, 0, 1.02);
  yTicks(ctx, s, x1, [0, 0.25, 0.5, 0.75, 1.0], (t) => t.toFixed(2));
  frame(ctx, "lg(μ − σw²)  [W]", "probability");
  polyline(ctx, s, xs, data.p_fa, "#9a6fb8");
  polyline(ctx, s, xs, data.xi_bar, "#b33");

  // Warden-optimal threshold marker.
  const mx = s.x(Math.log10(data.mu_star_w - floor));
  ctx.strokeStyle = "#1c2430";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(mx, s.y(0));
  ctx.lineTo(mx, s.y(1));
  ctx.stroke();
  ctx.setLineDash([]);
  legend(ctx, [
    ["average detection error ξ̄(μ)", "#b33"],
    ["false alarm rate", "#9a6fb8"],
  ]);

  $("detInfo").innerHTML =
    `warden minimum ξ̄₂* = <b>${data.xi2_star.toFixed(4)}</b> at μ* − σw² = ` +
    `<b>${(data.mu_star_w - floor).toExponential(2)}</b> W — covert if ξ̄₂* ≥ 1 − ε`;
}

function drawThroughput(v) {
  const data = parse(demo_throughput(v.seed, v.n, v.pj, v.tau, v.rmax, 240));
  const ctx = $("thr").getContext("2d");
  clear(ctx);

  const omegaMax = Math.max(...data.omega_bits, data.omega_star_bits) * 1.1;
  const xs = data.rate_bits;
  const s = makeScale(ctx, 0, xs[xs.length - 1], 0, 1.02);
  const sOmega = makeScale(ctx, 0, xs[xs.length - 1], 0, omegaMax);
  yTicks(ctx, s, xs[xs.length - 1], [0, 0.25, 0.5, 0.75, 1.0], (t) => t.toFixed(2));
  frame(ctx, "rate R [bits/s/Hz]", "outage δ (0–1) · Ω scaled");
  polyline(ctx, s, xs, data.delta, "#2563a8");
  polyline(ctx, sOmega, xs, data.omega_bits, "#1f8a4c");

  const rx = sOmega.x(data.rate_star_bits);
  const ry = sOmega.y(data.omega_star_bits);
  ctx.fillStyle = "#1c2430";
  ctx.beginPath();
  ctx.arc(rx, ry, 5, 0, 2 * Math.PI);
  ctx.fill();
  legend(ctx, [
    ["outage probability δ(R)", "#2563a8"],
    ["covert throughput Ω(R)", "#1f8a4c"],
  ]);

  $("thrInfo").innerHTML =
    `best rate R* = <b>${data.rate_star_bits.toFixed(3)}</b> bits/s/Hz → ` +
    `Ω* = <b>${data.omega_star_bits.toFixed(4)}</b> bits/s/Hz at this threshold`;
}

// ------------------------------------------------------------------ wiring

let pending = null;
function redraw() {
  const v = values();
  syncOutputs(v);
  status.textContent = "";
  try {
    drawGeometry(v);
    drawDetection(v);
    drawThroughput(v);
  } catch (e) {
    status.textContent = String(e);
  }
}

function schedule() {
  if (pending) cancelAnimationFrame(pending);
  pending = requestAnimationFrame(redraw);
}

init().then(() => {
  for (const c of Object.values(controls)) c.addEventListener("input", schedule);
  redraw();
}).catch((e) => {
  status.textContent =
    `failed to load wasm module: ${e}. Build it first: wasm-pack build crates/wasm --target web --release`;
});
