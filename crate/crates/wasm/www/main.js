import init, { gdofSweep, ldSimulate, gaussOptimize } from "./pkg/irclab_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (form, name) => Number(form.elements[name].value);

function guard(fn) {
  return (ev) => {
    ev?.preventDefault();
    $("error").textContent = "";
    try {
      fn();
    } catch (e) {
      $("error").textContent = String(e.message ?? e);
    }
  };
}

let sweepPoints = [];

function drawSweep() {
  const canvas = $("sweep-plot");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 36;
  ctx.clearRect(0, 0, w, h);
  if (!sweepPoints.length) return;

  const xmax = sweepPoints[sweepPoints.length - 1].alpha;
  const ymax = Math.ceil(Math.max(...sweepPoints.map((p) => Math.max(p.bound_known, p.gdof_irc ?? 0))) + 0.5);
  const x = (a) => pad + (a / xmax) * (w - 2 * pad);
  const y = (d) => h - pad - (d / ymax) * (h - 2 * pad);

  ctx.strokeStyle = "#ccc";
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  for (let d = 0; d <= ymax; d++) {
    ctx.beginPath();
    ctx.moveTo(pad, y(d));
    ctx.lineTo(w - pad, y(d));
    ctx.stroke();
    ctx.fillText(d, 10, y(d) + 4);
  }
  for (let a = 0; a <= xmax + 1e-9; a += 0.5) ctx.fillText(a.toFixed(1), x(a) - 8, h - 12);

  const line = (key, color, width) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = width;
    ctx.beginPath();
    let pen = false;
    for (const p of sweepPoints) {
      const v = p[key];
      if (v == null) {
        pen = false;
        continue;
      }
      pen ? ctx.lineTo(x(p.alpha), y(v)) : ctx.moveTo(x(p.alpha), y(v));
      pen = true;
    }
    ctx.stroke();
    ctx.lineWidth = 1;
  };
  line("gdof_ic", "#999", 1.5);
  line("bound_known", "#d1242f", 1.5);
  line("gdof_irc", "#1f6feb", 2.5);
}

const runSweep = guard(() => {
  const f = $("sweep");
  sweepPoints = JSON.parse(gdofSweep(num(f, "beta"), num(f, "gamma"), num(f, "step")));
  drawSweep();
});

$("sweep-plot").addEventListener("mousemove", (ev) => {
  if (!sweepPoints.length) return;
  const rect = ev.target.getBoundingClientRect();
  const frac = (ev.clientX - rect.left) / rect.width;
  const xmax = sweepPoints[sweepPoints.length - 1].alpha;
  const alpha = ((frac * ev.target.width - 36) / (ev.target.width - 72)) * xmax;
  const p = sweepPoints.reduce((best, q) => (Math.abs(q.alpha - alpha) < Math.abs(best.alpha - alpha) ? q : best));
  const g = p.gdof_irc == null ? "n/a" : p.gdof_irc.toFixed(3);
  $("sweep-hover").textContent =
    `alpha=${p.alpha.toFixed(2)}  gdof=${g}  known=${p.bound_known.toFixed(3)}  ic=${p.gdof_ic.toFixed(3)}  binding=${p.binding}  regime=${p.regime}`;
});

const runLd = guard(() => {
  const f = $("ld");
  const r = JSON.parse(
    ldSimulate(num(f, "nd"), num(f, "nc"), num(f, "nr"), num(f, "ns"), num(f, "blocks"), num(f, "seed")),
  );
  const target = r.target_gdof == null ? "" : `, GDoF ${r.target_gdof}`;
  $("ld-summary").textContent =
    `${r.bits_per_block} bits/block, ${r.delivered} delivered, ${r.errors} errors, normalized ${r.normalized_gdof}${target}`;
  $("ld-trace").textContent = r.trace;
});

const fmt = (v) => (Array.isArray(v) ? v.map(fmt).join(", ") : typeof v === "number" ? v.toPrecision(4) : v);

const runGauss = guard(() => {
  const f = $("gauss");
  const r = JSON.parse(
    gaussOptimize(num(f, "alpha"), num(f, "beta"), num(f, "gamma"), num(f, "snr"), num(f, "w"), num(f, "l")),
  );
  const rows = [
    ["sum rate (bits)", r.sum_rate],
    ["upper bound (bits)", r.upper_bound],
    ["P cn", r.cn],
    ["P cn future", r.cn_future],
    ["P cf", r.cf],
    ["P df", r.df],
    ["P cm", r.cm],
    ["relay P cf", r.relay_cf],
    ["relay P df", r.relay_df],
    ["binding", r.binding.join(" ")],
  ];
  $("gauss-out").innerHTML = rows.map(([k, v]) => `<tr><th>${k}</th><td>${fmt(v)}</td></tr>`).join("");
});

await init();
$("sweep").addEventListener("submit", runSweep);
$("ld").addEventListener("submit", runLd);
$("gauss").addEventListener("submit", runGauss);
runSweep();
runLd();
runGauss();
