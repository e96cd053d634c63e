#!/usr/bin/env python3
"""Generates fixtures/mini_blog.ndjson, a small synthetic comment corpus.

Planted structure (period 2008-01-01 .. 2008-03-31, one cycle every 3 days):
  * reply circle: four users answer each other's comments under posts of a
    hub blogger, so their ties only show up when replies are attributed to
    the comment they answer;
  * post circle: four bloggers comment on each other's posts with mildly
    positive (neutral band) text;
  * split circle: four bloggers comment on each other's posts once with
    strongly positive and once with strongly negative text, so every pair
    averages to 0;
  * a short-lived triangle in the first ten days (never stable);
  * a lurker who comments on every hub post, and seeded one-off noise.
"""
import json
import random
import sys
from datetime import datetime, timedelta, timezone

START = datetime(2008, 1, 1, tzinfo=timezone.utc)
CYCLES = 30
STEP_DAYS = 3

HUB = "hub_anna"
REPLY = ["marek", "ola", "piotr", "zosia"]
POSTERS = ["basia", "jurek", "kasia", "tomek"]
SPLIT = ["ewa", "igor", "lena", "rafal"]
BRIEF = ["dorota", "filip", "gosia"]
LURKER = "lurker_jan"
NOISE = [f"guest_{i:02d}" for i in range(10)]

NEUTRAL = "I read the article today"
MILD = "fine article"
POSITIVE = "excellent article"
NEGATIVE = "terrible article"


def main(path):
    rng = random.Random(20080101)
    events = []

    def emit(kind, author, post_author, when, text, parent=None):
        events.append({
            "event_id": f"e{len(events) + 1:06d}",
            "kind": kind,
            "author": author,
            "post_author": post_author,
            "parent_comment_author": parent,
            "timestamp": when.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "text": text,
        })

    for cycle in range(CYCLES):
        day = START + timedelta(days=STEP_DAYS * cycle)
        t = day + timedelta(hours=8)

        def tick():
            nonlocal t
            t += timedelta(minutes=1)
            return t

        emit("Post", HUB, HUB, tick(), "today a post about the budget")
        for user in REPLY:
            emit("CommentOnPost", user, HUB, tick(), NEUTRAL)
        for user in REPLY:
            for other in REPLY:
                if other != user:
                    emit("CommentOnComment", user, HUB, tick(), NEUTRAL, parent=other)
        emit("CommentOnPost", LURKER, HUB, tick(), "good point")

        for author in POSTERS:
            emit("Post", author, author, tick(), "my post")
            for user in POSTERS:
                if user != author:
                    emit("CommentOnPost", user, author, tick(), MILD)

        for author in SPLIT:
            emit("Post", author, author, tick(), "my post")
            for user in SPLIT:
                if user != author:
                    emit("CommentOnPost", user, author, tick(), POSITIVE)
                    emit("CommentOnPost", user, author, tick(), NEGATIVE)

        if cycle < 4:
            for author in BRIEF:
                emit("Post", author, author, tick(), "my post")
                for user in BRIEF:
                    if user != author:
                        emit("CommentOnPost", user, author, tick(), MILD)

    authors = [HUB] + POSTERS + SPLIT
    for guest in NOISE:
        for _ in range(2):
            day = START + timedelta(days=rng.randrange(90), hours=rng.randrange(24))
            emit("CommentOnPost", guest, rng.choice(authors), day, rng.choice([NEUTRAL, POSITIVE, NEGATIVE]))

    # Outside the analysed period: counted as dropped.
    emit("CommentOnPost", NOISE[0], HUB, datetime(2008, 4, 5, tzinfo=timezone.utc), NEUTRAL)

    with open(path, "w", encoding="utf-8") as out:
        for e in events:
            out.write(json.dumps(e, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/mini_blog.ndjson")
