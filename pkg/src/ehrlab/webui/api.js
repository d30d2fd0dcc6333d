// Typed fetch client for the game service.  Every call resolves to parsed
// JSON or rejects with an ApiError carrying the service's `detail` text, so
// callers never look at raw responses.
export class ApiError extends Error {
    constructor(status, detail) {
        super(detail);
        this.name = "ApiError";
        this.status = status;
        this.detail = detail;
    }
}
function detailOf(status, body) {
    if (body && typeof body === "object" && "detail" in body) {
        const d = body.detail;
        if (typeof d === "string")
            return d;
        if (Array.isArray(d)) {
            // request-validation errors arrive as a list of {loc, msg, ...}
            const parts = d.map((e) => e && typeof e === "object" && "msg" in e
                ? `${Array.isArray(e.loc) ? e.loc.join(".") + ": " : ""}${e.msg}`
                : JSON.stringify(e));
            return parts.join("; ");
        }
        return JSON.stringify(d);
    }
    return `HTTP ${status}`;
}
export class Client {
    constructor(base) {
        this.base = base.replace(/\/$/, "");
    }
    async request(path, init) {
        const res = await fetch(this.base + path, init);
        let body = null;
        try {
            body = await res.json();
        }
        catch {
            body = null;
        }
        if (!res.ok)
            throw new ApiError(res.status, detailOf(res.status, body));
        return body;
    }
    createSession(cfg) {
        return this.request("/sessions", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(cfg),
        });
    }
    getState(sid) {
        return this.request(`/sessions/${encodeURIComponent(sid)}`);
    }
    move(sid, move) {
        return this.request(`/sessions/${encodeURIComponent(sid)}/moves`, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(move),
        });
    }
    hint(sid) {
        return this.request(`/sessions/${encodeURIComponent(sid)}/hint`);
    }
}
