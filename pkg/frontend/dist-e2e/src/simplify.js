/** Pointer-trace simplification and SVG path-data helpers. */
function perpendicularDistance(p, a, b) {
    const dx = b.x - a.x;
    const dy = b.y - a.y;
    const len2 = dx * dx + dy * dy;
    if (len2 === 0)
        return Math.hypot(p.x - a.x, p.y - a.y);
    const u = Math.max(0, Math.min(1, ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2));
    return Math.hypot(p.x - (a.x + u * dx), p.y - (a.y + u * dy));
}
/** Ramer-Douglas-Peucker polyline simplification. */
export function simplify(points, epsilon = 1) {
    if (points.length <= 2)
        return points.slice();
    let maxDist = -1;
    let maxIdx = 0;
    const a = points[0];
    const b = points[points.length - 1];
    for (let i = 1; i < points.length - 1; i++) {
        const d = perpendicularDistance(points[i], a, b);
        if (d > maxDist) {
            maxDist = d;
            maxIdx = i;
        }
    }
    if (maxDist <= epsilon)
        return [a, b];
    const left = simplify(points.slice(0, maxIdx + 1), epsilon);
    const right = simplify(points.slice(maxIdx), epsilon);
    return left.slice(0, -1).concat(right);
}
const fmt = (v) => {
    const s = v.toFixed(3);
    return s.replace(/\.?0+$/, "") || "0";
};
/** Polyline to M/L path data for POST /strokes. */
export function toPathData(points) {
    if (points.length === 0)
        return "";
    const parts = [`M ${fmt(points[0].x)} ${fmt(points[0].y)}`];
    for (let i = 1; i < points.length; i++) {
        parts.push(`L ${fmt(points[i].x)} ${fmt(points[i].y)}`);
    }
    return parts.join(" ");
}
/** Rectangle drag to the service's polygon format. */
export function rectToPolygon(a, b) {
    const x0 = Math.min(a.x, b.x);
    const y0 = Math.min(a.y, b.y);
    const x1 = Math.max(a.x, b.x);
    const y1 = Math.max(a.y, b.y);
    return [
        [x0, y0],
        [x1, y0],
        [x1, y1],
        [x0, y1],
    ];
}
