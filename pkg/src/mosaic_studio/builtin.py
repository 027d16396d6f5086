"""The built-in piece registry: 39 bundled models, 6 input pieces.

The model table is data, not code: one row per piece with its wiring
signature, tooltip copy, and parameter schemas. Dual-input rows list
channel 0 first. ``ask_gpt`` is the language-model glue piece; its three
behaviors (custom instruction, prompt translation, idea generation) are
selected through its ``mode`` parameter.
"""

from __future__ import annotations

from .modality import Modality
from .pieces import ExampleIO, ParameterSchema, PieceKind, PieceSpec, Socket

SEED_TOOLTIP = (
    "Starting value for randomness. The same seed repeats the same result; "
    "change it to get a new variation."
)


def _seed() -> ParameterSchema:
    return ParameterSchema("seed", "integer", 0, SEED_TOOLTIP, minimum=0, maximum=2**32 - 1)


def _guidance(default: float = 7.5) -> ParameterSchema:
    return ParameterSchema(
        "guidance_scale",
        "real",
        default,
        "How closely the result follows your prompt. Higher sticks to the "
        "prompt, lower lets the model improvise.",
        minimum=1.0,
        maximum=20.0,
    )


def _strength() -> ParameterSchema:
    return ParameterSchema(
        "control_strength",
        "real",
        1.0,
        "How strongly the guide image constrains the layout. Lower values "
        "give the prompt more freedom.",
        minimum=0.0,
        maximum=2.0,
    )


def _duration(default: float) -> ParameterSchema:
    return ParameterSchema(
        "duration_seconds",
        "real",
        default,
        "Length of the generated audio in seconds.",
        minimum=1.0,
        maximum=30.0,
    )


# (spec_id, display name, backing model, inputs, output, runtime s,
#  description, example inputs, example output, parameters)
MODEL_ROWS = [
    (
        "ask_gpt", "Ask GPT", "GPT-4", ["text"], "text", 4,
        "Ask a large language model to reason over text: follow a custom "
        "instruction, rewrite text into a generation prompt, or brainstorm an idea.",
        [("text", "sofa, fireplace, wooden ladder, lamps")],
        ("text", "An airy loft concept built around warm natural materials."),
        (
            ParameterSchema(
                "mode", "enum", "custom",
                "Which glue behavior to use: follow a custom instruction, "
                "rewrite text into a prompt for a generation model, or "
                "brainstorm an idea for a task.",
                choices=("custom", "translation", "ideation"),
            ),
            ParameterSchema(
                "instruction", "text", "",
                "Custom mode: the instruction applied to the incoming text.",
            ),
            ParameterSchema(
                "task", "text", "",
                "Ideation mode: the design task to brainstorm for.",
            ),
            ParameterSchema(
                "target_modality", "enum", "image",
                "Translation mode: the kind of generator the rewritten "
                "prompt will be fed into.",
                choices=("image", "video", "3d", "audio", "sketch"),
            ),
            ParameterSchema(
                "example_prompts", "text", "",
                "Translation mode: newline-separated example prompts that "
                "override the built-in list.",
            ),
        ),
    ),
    (
        "generate_image", "Generate image", "Stable Diffusion", ["text"], "image", 6,
        "Create a picture from a written prompt.",
        [("text", "a lighthouse on a cliff at dusk, oil painting")],
        ("image", "painted lighthouse scene"),
        (_seed(), _guidance(), ParameterSchema(
            "steps", "integer", 30,
            "How many refinement passes to run. More passes take longer and add detail.",
            minimum=1, maximum=100,
        )),
    ),
    (
        "generate_video", "Generate video", "AnimateDiff", ["text"], "video", 45,
        "Create a short video clip from a written prompt.",
        [("text", "waves rolling onto a beach at sunrise")],
        ("video", "looping beach clip"),
        (_seed(), _guidance(), ParameterSchema(
            "num_frames", "integer", 16,
            "How many frames to produce. More frames make a longer clip.",
            minimum=8, maximum=64,
        )),
    ),
    (
        "generate_3d_model", "Generate 3D model", "Shap-E", ["text"], "3d", 30,
        "Create a textured 3D asset out of a written prompt.",
        [("text", "a mid-century armchair, teal upholstery")],
        ("3d", "armchair mesh"),
        (_seed(), _guidance(15.0)),
    ),
    (
        "generate_sound_effects", "Generate sound effects", "AudioGen",
        ["text"], "audio(sound_effects)", 12,
        "Produce a sound effect matching a written description.",
        [("text", "rain on a tin roof with distant thunder")],
        ("audio(sound_effects)", "rain ambience"),
        (_seed(), _duration(5.0)),
    ),
    (
        "generate_music", "Generate music", "MusicGen", ["text"], "audio(music)", 20,
        "Compose a piece of music from a written description.",
        [("text", "chill electronic track with soft pads")],
        ("audio(music)", "electronic music clip"),
        (_seed(), _duration(8.0)),
    ),
    (
        "generate_speech", "Generate speech", "Bark", ["text"], "audio(speech)", 8,
        "Read text aloud as natural sounding speech.",
        [("text", "Welcome to your newly redesigned home.")],
        ("audio(speech)", "spoken welcome line"),
        (_seed(), ParameterSchema(
            "voice", "enum", "narrator",
            "Overall speaking style of the voice.",
            choices=("announcer", "narrator", "conversational"),
        )),
    ),
    (
        "describe_image", "Describe image", "BLIP", ["image"], "text", 2,
        "Write a one sentence caption describing what a photo shows.",
        [("image", "living room photo")],
        ("text", "A bright living room with a fireplace and a wooden ladder."),
        (),
    ),
    (
        "tag_image", "Tag image", "Segment Anything", ["image"], "text", 3,
        "Identify the objects inside the image and list them as text tags.",
        [("image", "living room photo")],
        ("text", "sofa, fireplace, wooden ladder, lamps"),
        (ParameterSchema(
            "max_tags", "integer", 20,
            "Upper limit on how many object tags to return.",
            minimum=1, maximum=50,
        ),),
    ),
    (
        "extract_text_in_image", "Extract text in image", "PyTesseract",
        ["image"], "text", 2,
        "Read the characters printed or written inside a picture.",
        [("image", "photo of a street sign")],
        ("text", "MARKET STREET"),
        (),
    ),
    (
        "classify_emotion_from_face", "Classify emotion from face",
        "ResidualMaskingNetwork", ["image"], "text", 2,
        "Name the emotion expressed by the face in a photo.",
        [("image", "portrait photo")],
        ("text", "happy"),
        (),
    ),
    (
        "increase_image_resolution", "Increase image resolution", "Real-ESRGAN",
        ["image"], "image", 5,
        "Upscale a picture to a sharper, higher resolution version.",
        [("image", "small render")],
        ("image", "4x upscaled render"),
        (ParameterSchema(
            "scale", "integer", 4,
            "Multiplier applied to width and height.",
            minimum=2, maximum=4,
        ),),
    ),
    (
        "restore_distorted_face", "Restore distorted face", "GFPGAN",
        ["image"], "image", 4,
        "Repair blurry or damaged faces in a photo.",
        [("image", "old damaged portrait")],
        ("image", "restored portrait"),
        (),
    ),
    (
        "grayscale_to_color", "Grayscale → Color", "BigColor", ["image"], "image", 4,
        "Colorize a black and white photo.",
        [("image", "black and white street photo")],
        ("image", "colorized street photo"),
        (),
    ),
    (
        "remove_image_background", "Remove image background", "Rembg",
        ["image"], "image", 3,
        "Cut the subject out of a picture and erase everything behind it.",
        [("image", "product photo on a desk")],
        ("image", "product on transparent backdrop"),
        (),
    ),
    (
        "remove_people", "Remove people", "EdgeConnect", ["image"], "image", 6,
        "Erase people from a photo and fill in the scene behind them.",
        [("image", "interior photo with two people")],
        ("image", "the same interior, empty"),
        (),
    ),
    (
        "get_human_pose", "Get human pose", "OpenPose", ["image"], "image(pose)", 2,
        "Extract the human pose from a photo as a stick-figure skeleton.",
        [("image", "photo of a dancer")],
        ("image(pose)", "pose skeleton"),
        (),
    ),
    (
        "get_segmentation_map", "Get segmentation map", "Segment Anything",
        ["image"], "image(segmentation)", 4,
        "Split a photo into a segmentation map of labeled regions, one per object.",
        [("image", "living room photo")],
        ("image(segmentation)", "colored region map"),
        (),
    ),
    (
        "get_depth_map", "Get depth map", "MiDaS", ["image"], "image(depth)", 3,
        "Estimate a depth map telling how far each part of a photo is from the camera.",
        [("image", "living room photo")],
        ("image(depth)", "grayscale depth map"),
        (),
    ),
    (
        "get_normal_map", "Get normal map", "MiDaS", ["image"], "image(normal)", 3,
        "Estimate a normal map of surface directions for each part of a photo.",
        [("image", "living room photo")],
        ("image(normal)", "surface normal map"),
        (),
    ),
    (
        "get_edge_map", "Get edge map", "HED", ["image"], "image(edge)", 2,
        "Trace the outlines in a photo as an edge map line drawing.",
        [("image", "living room photo")],
        ("image(edge)", "line drawing of the room"),
        (),
    ),
    (
        "generate_3d_model_from_image", "Generate 3D model from image",
        "One-2-3-45", ["image"], "3d", 50,
        "Turn a single image of an object into a textured 3D asset.",
        [("image", "photo of a redesigned room")],
        ("3d", "room mockup mesh"),
        (_seed(),),
    ),
    (
        "classify_video", "Classify video", "X-CLIP", ["video"], "text", 5,
        "Name the action or subject shown in a video clip.",
        [("video", "clip of someone kneading dough")],
        ("text", "baking bread"),
        (),
    ),
    (
        "remove_video_background", "Remove video background",
        "Robust Video Matting", ["video"], "video", 40,
        "Separate the foreground of a video from its backdrop.",
        [("video", "presenter in a cluttered office")],
        ("video", "presenter on a clean backdrop"),
        (),
    ),
    (
        "increase_video_resolution", "Increase video resolution", "RealBasicVSR",
        ["video"], "video", 55,
        "Upscale a video to a sharper, higher resolution version.",
        [("video", "low resolution clip")],
        ("video", "upscaled clip"),
        (ParameterSchema(
            "scale", "integer", 2,
            "Multiplier applied to width and height.",
            minimum=2, maximum=4,
        ),),
    ),
    (
        "increase_video_frame_rate", "Increase video frame rate", "RIFE",
        ["video"], "video", 30,
        "Interpolate extra frames so motion plays back smoother.",
        [("video", "choppy 12 fps clip")],
        ("video", "smooth 24 fps clip"),
        (ParameterSchema(
            "factor", "integer", 2,
            "Multiplier applied to the frames per second.",
            minimum=2, maximum=4,
        ),),
    ),
    (
        "classify_music_genre", "Classify music genre", "MusicClassification",
        ["audio"], "text", 3,
        "Name the genre of a music recording.",
        [("audio", "30 second song excerpt")],
        ("text", "lo-fi hip hop"),
        (),
    ),
    (
        "transcribe_speech", "Transcribe speech", "Whisper", ["audio"], "text", 10,
        "Write down the words spoken in an audio recording.",
        [("audio", "voice memo")],
        ("text", "Remember to send the mood board on Friday."),
        (),
    ),
    (
        "generate_image_from_text_and_driving_image",
        "Generate image from text and driving image", "Instruct-Pix2Pix",
        ["image", "text"], "image", 7,
        "Apply a written editing instruction to an existing picture.",
        [("image", "redesigned room render"),
         ("text", "replace the wooden ladder with a glass spiral staircase")],
        ("image", "room with a glass spiral staircase"),
        (_seed(), _guidance()),
    ),
    (
        "edit_face_with_text", "Edit face with text", "StyleCLIP",
        ["image", "text"], "image", 6,
        "Adjust facial features in a portrait following a written instruction.",
        [("image", "portrait photo"), ("text", "add a subtle smile")],
        ("image", "portrait with a subtle smile"),
        (_seed(),),
    ),
    (
        "generate_image_from_text_and_human_pose",
        "Generate image from text and human pose", "ControlNet",
        ["image(pose)", "text"], "image", 8,
        "Create a picture from a written prompt, posing any people to match "
        "the guide pose skeleton.",
        [("image(pose)", "pose skeleton of a superhero flight pose"),
         ("text", "a knight soaring over a canyon")],
        ("image", "knight matching the pose"),
        (_seed(), _guidance(), _strength()),
    ),
    (
        "generate_image_from_text_and_segmentation_map",
        "Generate image from text and segmentation map", "ControlNet",
        ["image(segmentation)", "text"], "image", 8,
        "Create a picture from a written prompt, laying out objects to match "
        "the guide regions.",
        [("image(segmentation)", "region map of a living room"),
         ("text", "a japandi living room, warm light")],
        ("image", "japandi room matching the regions"),
        (_seed(), _guidance(), _strength()),
    ),
    (
        "generate_image_from_text_and_depth_map",
        "Generate image from text and depth map", "ControlNet",
        ["image(depth)", "text"], "image", 8,
        "Create a picture from a written prompt, keeping the near and far "
        "geometry of the guide image.",
        [("image(depth)", "depth map of a living room"),
         ("text", "an airy contemporary living room")],
        ("image", "restyled room with the same geometry"),
        (_seed(), _guidance(), _strength()),
    ),
    (
        "generate_image_from_text_and_normal_map",
        "Generate image from text and normal map", "ControlNet",
        ["image(normal)", "text"], "image", 8,
        "Create a picture from a written prompt, matching the surface angles "
        "of the guide image.",
        [("image(normal)", "normal map of a statue"),
         ("text", "a marble statue in morning light")],
        ("image", "statue with matching surfaces"),
        (_seed(), _guidance(), _strength()),
    ),
    (
        "generate_image_from_text_and_edge_map",
        "Generate image from text and edge map", "ControlNet",
        ["image(edge)", "text"], "image", 8,
        "Create a picture from a written prompt, following the outlines of "
        "the guide image.",
        [("image(edge)", "line drawing of a living room"),
         ("text", "a rustic cabin living room")],
        ("image", "cabin room following the outlines"),
        (_seed(), _guidance(), _strength()),
    ),
    (
        "animate_a_face_to_talk", "Animate a face to talk", "SadTalker",
        ["image", "audio"], "video", 40,
        "Animate a portrait so it lip-syncs a speech recording.",
        [("image", "character portrait"), ("audio", "recorded line of dialogue")],
        ("video", "talking portrait clip"),
        (_seed(),),
    ),
    (
        "clone_a_voice", "Clone a voice", "FreeVC", ["audio", "audio"], "audio", 15,
        "Re-voice a recording so it sounds like a reference speaker.",
        [("audio", "narration in the original voice"),
         ("audio", "sample of the reference speaker")],
        ("audio", "narration in the reference voice"),
        (),
    ),
    (
        "generate_image_from_text_and_sketch",
        "Generate image from text and sketch", "ControlNet",
        ["sketch", "text"], "image", 8,
        "Create a picture from a written prompt, guided by a rough sketch.",
        [("sketch", "rough sketch of a treehouse"),
         ("text", "a cozy treehouse at golden hour")],
        ("image", "treehouse following the sketch"),
        (_seed(), _guidance(), _strength()),
    ),
    (
        "generate_artwork_from_text_and_sketch",
        "Generate artwork from text and sketch", "Scribble Stories",
        ["sketch", "text"], "image", 9,
        "Paint stylized artwork from a written prompt and a rough sketch.",
        [("sketch", "scribble of a dragon"),
         ("text", "a friendly dragon in a storybook style")],
        ("image", "storybook dragon artwork"),
        (_seed(), _guidance()),
    ),
]

# (spec_id, display name, output, description, example action, example output)
INPUT_ROWS = [
    ("type_text", "Type text", "text",
     "Provide words by typing them in.",
     "type a design brief", ("text", "the typed text")),
    ("upload_image", "Upload image", "image",
     "Provide a picture file from disk.",
     "drop in a photo", ("image", "the uploaded photo")),
    ("upload_video", "Upload video", "video",
     "Provide a moving-picture file from disk.",
     "drop in a clip", ("video", "the uploaded clip")),
    ("upload_3d_model", "Upload 3D model", "3d",
     "Provide a mesh file from disk.",
     "drop in a mesh", ("3d", "the uploaded mesh")),
    ("upload_audio", "Upload audio", "audio",
     "Provide a recording file from disk.",
     "drop in a recording", ("audio", "the uploaded recording")),
    ("draw_sketch", "Draw sketch", "sketch",
     "Provide a freehand drawing from the pad.",
     "draw on the sketch pad", ("sketch", "the drawn sketch")),
]

# The walkthrough narrative names this capability "Caption image"; the
# bundled piece is "Describe image". Keep the alternate id resolvable so
# assistant plans using either name materialize.
ALIASES = {"caption_image": "describe_image"}


def _example(inputs, output) -> ExampleIO:
    return ExampleIO(
        inputs=tuple((Modality.parse(m), desc) for m, desc in inputs),
        output=(Modality.parse(output[0]), output[1]),
    )


def build_specs() -> list[PieceSpec]:
    """All built-in specs: the model table first, then the input pieces."""
    specs: list[PieceSpec] = []
    for row in MODEL_ROWS:
        spec_id, name, model, inputs, output, runtime, desc, ex_in, ex_out, params = row
        kind = PieceKind.GLUE if spec_id == "ask_gpt" else PieceKind.MODEL
        specs.append(
            PieceSpec(
                spec_id=spec_id,
                display_name=name,
                kind=kind,
                input_sockets=tuple(
                    Socket(Modality.parse(m), i) for i, m in enumerate(inputs)
                ),
                output_socket=Socket(Modality.parse(output)),
                description=desc,
                typical_runtime_seconds=float(runtime),
                example_io=_example(ex_in, ex_out),
                parameters=tuple(params),
                model_name=model,
            )
        )
    for spec_id, name, output, desc, action, ex_out in INPUT_ROWS:
        specs.append(
            PieceSpec(
                spec_id=spec_id,
                display_name=name,
                kind=PieceKind.INPUT,
                input_sockets=(),
                output_socket=Socket(Modality.parse(output)),
                description=desc,
                typical_runtime_seconds=1.0,
                example_io=ExampleIO(
                    inputs=(), output=(Modality.parse(ex_out[0]), ex_out[1])
                ),
                parameters=(),
                model_name="",
            )
        )
    return specs
